#include "siteguard/epipolar.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "siteguard/errors.hpp"

namespace siteguard {

Eigen::Matrix3d skew(const Eigen::Vector3d& t) {
  Eigen::Matrix3d s;
  s << 0.0, -t.z(), t.y(), t.z(), 0.0, -t.x(), -t.y(), t.x(), 0.0;
  return s;
}

Eigen::Matrix3d normalize_fundamental(const Eigen::Matrix3d& f) {
  const double norm = f.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw Error(ErrorCode::DegenerateBaseline, "zero fundamental matrix");
  Eigen::Matrix3d out = f / norm;
  // Sign: first entry (row-major) of maximal magnitude is positive. Near-ties
  // resolve to the earliest entry so the choice is stable under rounding.
  const double max_abs = out.cwiseAbs().maxCoeff();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      if (std::abs(out(r, c)) >= max_abs * (1.0 - 1e-9)) {
        if (out(r, c) < 0.0) out = -out;
        return out;
      }
    }
  }
  return out;
}

FundamentalPair FundamentalPair::from_matrices(const Eigen::Matrix3d& f_ij, const Eigen::Matrix3d& f_ji) {
  return {normalize_fundamental(f_ij), normalize_fundamental(f_ji)};
}

namespace {

// F such that p_j^T F p_i = 0, from the relative pose i -> j.
Eigen::Matrix3d oriented_fundamental(const CameraParams& ci, const CameraParams& cj) {
  const Eigen::Matrix3d r_ij = cj.rotation * ci.rotation.transpose();
  const Eigen::Vector3d t_ij = cj.translation - r_ij * ci.translation;
  const Eigen::Matrix3d essential = skew(t_ij) * r_ij;
  const Eigen::Matrix3d ki_inv = ci.intrinsics.inverse();
  const Eigen::Matrix3d kj_inv = cj.intrinsics.inverse();
  return kj_inv.transpose() * essential * ki_inv;
}

}  // namespace

FundamentalPair compute_fundamental(const CameraParams& cam_i, const CameraParams& cam_j) {
  if ((cam_i.center() - cam_j.center()).norm() <= 1e-9)
    throw Error(ErrorCode::DegenerateBaseline, "cameras " + std::to_string(cam_i.id) + " and " +
                                                   std::to_string(cam_j.id) + " share a center");
  return FundamentalPair::from_matrices(oriented_fundamental(cam_i, cam_j), oriented_fundamental(cam_j, cam_i));
}

namespace {

double line_term(const Eigen::Matrix3d& f, const Eigen::Vector3d& from, const Eigen::Vector3d& to,
                 DistanceMode mode) {
  const Eigen::Vector3d line = f * from;
  const double residual = std::abs(line.dot(to));
  if (mode == DistanceMode::algebraic) return residual;
  const double scale = std::hypot(line.x(), line.y());
  // A vanishing line means `from` is the epipole; no finite distance exists.
  if (scale < 1e-300) return residual == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return residual / scale;
}

}  // namespace

double epipolar_distance(const Point2D& p_i, const Point2D& p_j, const FundamentalPair& pair, DistanceMode mode) {
  const Eigen::Vector3d hi = p_i.homogeneous();
  const Eigen::Vector3d hj = p_j.homogeneous();
  return line_term(pair.f_ij, hi, hj, mode) + line_term(pair.f_ji, hj, hi, mode);
}

FundamentalSet::FundamentalSet(const std::vector<CameraParams>& cams) : count_(cams.size()) {
  pairs_.resize(count_ * count_);
  for (std::size_t a = 0; a < count_; ++a) {
    for (std::size_t b = a + 1; b < count_; ++b) {
      const FundamentalPair p = compute_fundamental(cams[a], cams[b]);
      pairs_[a * count_ + b] = p;
      pairs_[b * count_ + a] = p.reversed();
    }
  }
}

const FundamentalPair& FundamentalSet::pair(std::size_t a, std::size_t b) const {
  if (a >= count_ || b >= count_ || a == b) throw std::logic_error("FundamentalSet: invalid view pair");
  return pairs_[a * count_ + b];
}

}  // namespace siteguard
