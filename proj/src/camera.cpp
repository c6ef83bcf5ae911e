#include "siteguard/camera.hpp"

#include <cmath>
#include <set>

#include <Eigen/Dense>

#include "siteguard/errors.hpp"
#include "siteguard/json_io.hpp"

namespace siteguard {

Eigen::Vector3d CameraParams::center() const { return -rotation.transpose() * translation; }

Eigen::Matrix<double, 3, 4> CameraParams::projection_matrix() const {
  Eigen::Matrix<double, 3, 4> rt;
  rt.leftCols<3>() = rotation;
  rt.col(3) = translation;
  return intrinsics * rt;
}

Eigen::Vector3d CameraParams::to_camera(const Eigen::Vector3d& x_world) const {
  return rotation * x_world + translation;
}

bool CameraParams::in_image(const Point2D& p) const {
  return p.u >= 0.0 && p.v >= 0.0 && p.u < static_cast<double>(width) && p.v < static_cast<double>(height);
}

void validate(const CameraParams& cam) {
  const std::string who = "camera " + std::to_string(cam.id) + ": ";
  const Eigen::Matrix3d& r = cam.rotation;
  if (!r.allFinite() || !cam.intrinsics.allFinite() || !cam.translation.allFinite())
    throw Error(ErrorCode::BadCalibration, who + "non-finite parameters");
  if ((r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-6)
    throw Error(ErrorCode::BadCalibration, who + "rotation is not orthonormal");
  if (std::abs(r.determinant() - 1.0) > 1e-6)
    throw Error(ErrorCode::BadCalibration, who + "rotation determinant is not +1");
  const Eigen::Matrix3d& k = cam.intrinsics;
  if (k(1, 0) != 0.0 || k(2, 0) != 0.0 || k(2, 1) != 0.0)
    throw Error(ErrorCode::BadCalibration, who + "intrinsics are not upper-triangular");
  if (!(k(0, 0) > 0.0) || !(k(1, 1) > 0.0))
    throw Error(ErrorCode::BadCalibration, who + "focal lengths must be positive");
  if (std::abs(k(2, 2) - 1.0) > 1e-12) throw Error(ErrorCode::BadCalibration, who + "K(2,2) must be 1");
  if (cam.width <= 0 || cam.height <= 0) throw Error(ErrorCode::BadCalibration, who + "image size must be positive");
}

Point2D project(const CameraParams& cam, const Eigen::Vector3d& x_world) {
  const Eigen::Vector3d xc = cam.to_camera(x_world);
  if (!(xc.z() > 1e-9)) throw Error(ErrorCode::BehindCamera, "point has camera-frame z " + std::to_string(xc.z()));
  const Eigen::Vector3d p = cam.intrinsics * xc;
  return Point2D::at(p.x() / p.z(), p.y() / p.z(), 1.0);
}

namespace {

template <int N>
Eigen::Matrix<double, N, 1> read_vec(const Json& j, const char* key, const std::string& who) {
  if (!j.contains(key) || !j.at(key).is_array() || j.at(key).size() != N)
    throw Error(ErrorCode::BadCalibration, who + "'" + key + "' must be an array of " + std::to_string(N));
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) {
    const Json& e = j.at(key)[i];
    if (!e.is_number()) throw Error(ErrorCode::BadCalibration, who + "'" + key + "' has a non-number");
    v(i) = e.get<double>();
  }
  return v;
}

Eigen::Matrix3d row_major(const Eigen::Matrix<double, 9, 1>& v) {
  Eigen::Matrix3d m;
  m << v(0), v(1), v(2), v(3), v(4), v(5), v(6), v(7), v(8);
  return m;
}

}  // namespace

std::vector<CameraParams> parse_calibration(const std::string& text) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::BadCalibration, std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_array() || root.empty()) throw Error(ErrorCode::BadCalibration, "expected a non-empty array");
  std::vector<CameraParams> cams;
  std::set<int> ids;
  for (std::size_t i = 0; i < root.size(); ++i) {
    const Json& j = root[i];
    const std::string who = "entry " + std::to_string(i) + ": ";
    if (!j.is_object()) throw Error(ErrorCode::BadCalibration, who + "not an object");
    CameraParams cam;
    try {
      cam.id = j.at("id").get<int>();
      cam.width = j.at("width").get<int>();
      cam.height = j.at("height").get<int>();
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::BadCalibration, who + e.what());
    }
    cam.intrinsics = row_major(read_vec<9>(j, "K", who));
    cam.rotation = row_major(read_vec<9>(j, "R", who));
    cam.translation = read_vec<3>(j, "t", who);
    if (j.contains("dist")) {
      const auto dist = read_vec<5>(j, "dist", who);
      if (dist.cwiseAbs().maxCoeff() != 0.0)
        throw Error(ErrorCode::BadCalibration, who + "lens distortion is not supported (dist must be zero)");
    }
    if (!ids.insert(cam.id).second) throw Error(ErrorCode::BadCalibration, who + "duplicate camera id");
    validate(cam);
    cams.push_back(cam);
  }
  return cams;
}

std::vector<CameraParams> load_calibration(const std::filesystem::path& path) {
  try {
    return parse_calibration(read_text_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Io) throw Error(ErrorCode::BadCalibration, e.what());
    throw;
  }
}

std::string serialize_calibration(const std::vector<CameraParams>& cams) {
  nlohmann::ordered_json root = nlohmann::ordered_json::array();
  for (const auto& c : cams) {
    nlohmann::ordered_json j;
    j["id"] = c.id;
    auto mat = [](const Eigen::Matrix3d& m) {
      std::vector<double> v;
      for (int r = 0; r < 3; ++r)
        for (int col = 0; col < 3; ++col) v.push_back(round_sig9(m(r, col)));
      return v;
    };
    j["K"] = mat(c.intrinsics);
    j["R"] = mat(c.rotation);
    j["t"] = {round_sig9(c.translation.x()), round_sig9(c.translation.y()), round_sig9(c.translation.z())};
    j["width"] = c.width;
    j["height"] = c.height;
    j["dist"] = {0.0, 0.0, 0.0, 0.0, 0.0};
    root.push_back(j);
  }
  return root.dump(2) + "\n";
}

}  // namespace siteguard
