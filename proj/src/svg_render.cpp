#include "siteguard/svg_render.hpp"

#include <array>
#include <cstdio>
#include <optional>

#include "siteguard/errors.hpp"

namespace siteguard {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

std::optional<Point2D> to_pixel(const CameraParams& cam, const Json& xyz) {
  if (!xyz.is_array() || xyz.size() != 3) return std::nullopt;
  const Eigen::Vector3d x(xyz[0].get<double>(), xyz[1].get<double>(), xyz[2].get<double>());
  if (cam.to_camera(x).z() <= 1e-9) return std::nullopt;
  return project(cam, x);
}

const Json* entry_at(const Json& track, int frame) {
  for (const auto& h : track.at("history"))
    if (h.at("frame").get<int>() == frame) return &h;
  return nullptr;
}

}  // namespace

std::string render_reprojection(const Json& dump, const CameraParams& cam, int frame) {
  const Json& frames = dump.at("frames");
  if (frames.is_null() || frame < frames[0].get<int>() || frame > frames[1].get<int>())
    throw Error(ErrorCode::FrameNotFound, "frame " + std::to_string(frame) + " is not in the tracks dump");

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(cam.width) + "\" height=\"" +
         std::to_string(cam.height) + "\" viewBox=\"0 0 " + std::to_string(cam.width) + " " +
         std::to_string(cam.height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  svg += "<text x=\"10\" y=\"24\" font-family=\"monospace\" font-size=\"18\">camera " + std::to_string(cam.id) +
         " frame " + std::to_string(frame) + "</text>\n";

  for (const auto& track : dump.at("tracks")) {
    const Json* entry = entry_at(track, frame);
    if (!entry) continue;
    const int id = track.at("track_id").get<int>();
    const std::string cls = track.at("class").get<std::string>();
    const bool violated = entry->contains("violations") && !entry->at("violations").empty();
    const std::string state = violated ? kViolationColor : kCompliantColor;

    if (entry->contains("joints")) {
      const Json& joints = entry->at("joints");
      std::array<std::optional<Point2D>, kNumJoints> px;
      for (std::size_t j = 0; j < kNumJoints && j < joints.size(); ++j) px[j] = to_pixel(cam, joints[j]);
      svg += "<g class=\"worker\" id=\"track-" + std::to_string(id) + "\" stroke=\"" + state + "\" fill=\"" + state +
             "\">\n";
      for (const auto& [a, b] : kCocoEdges) {
        if (!px[a] || !px[b]) continue;
        svg += "<line x1=\"" + fmt(px[a]->u) + "\" y1=\"" + fmt(px[a]->v) + "\" x2=\"" + fmt(px[b]->u) + "\" y2=\"" +
               fmt(px[b]->v) + "\" stroke-width=\"3\"/>\n";
      }
      std::optional<Point2D> label;
      for (const auto& p : px) {
        if (!p) continue;
        if (!label || p->v < label->v) label = p;
        svg += "<circle cx=\"" + fmt(p->u) + "\" cy=\"" + fmt(p->v) + "\" r=\"4\"/>\n";
      }
      if (label)
        svg += "<text x=\"" + fmt(label->u + 8) + "\" y=\"" + fmt(label->v - 8) +
               "\" font-family=\"monospace\" font-size=\"16\" stroke=\"none\">worker " + std::to_string(id) +
               "</text>\n";
      svg += "</g>\n";
    } else if (entry->contains("position")) {
      const auto p = to_pixel(cam, entry->at("position"));
      if (!p) continue;
      svg += "<g class=\"object\" id=\"track-" + std::to_string(id) + "\">\n";
      svg += "<rect x=\"" + fmt(p->u - 8) + "\" y=\"" + fmt(p->v - 8) +
             "\" width=\"16\" height=\"16\" fill=\"" + std::string(kObjectColor) + "\" stroke=\"" +
             (violated ? std::string(kViolationColor) : std::string(kObjectColor)) + "\" stroke-width=\"3\"/>\n";
      svg += "<text x=\"" + fmt(p->u + 12) + "\" y=\"" + fmt(p->v + 5) + "\" font-family=\"monospace\" font-size=\"16\" fill=\"" +
             std::string(kObjectColor) + "\">" + cls + " " + std::to_string(id) + "</text>\n";
      svg += "</g>\n";
    }
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace siteguard
