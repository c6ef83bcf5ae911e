#pragma once

#include <vector>

#include "siteguard/compliance.hpp"
#include "siteguard/detection.hpp"
#include "siteguard/pipeline.hpp"

namespace siteguard {

// Pixel height of a worker detection: nose to mean ankle, falling back to
// the bbox height.
std::optional<double> pixel_height(const Detection2D& det);

// Single-frame, single-camera evaluation in pixel space: no association,
// triangulation, tracking or latching. Fractional thresholds scale with the
// worker's pixel height; metric ones are converted through the nominal
// height. Throws InvalidConfig when records span more than one camera.
std::vector<ViolationEvent> run_baseline_single_view(const PipelineConfig& cfg,
                                                     const std::vector<DetectionRecord>& records);

}  // namespace siteguard
