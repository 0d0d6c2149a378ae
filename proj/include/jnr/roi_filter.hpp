#pragma once

// Drops detections that fall outside the preset torso region where jersey
// numbers appear. Overlap is scored with the min-area-normalized intersection
//   I* = A(R1 n R2) / (min(A(R1), A(R2)) + eps)
// instead of IoU, so a small digit box fully inside the large RoI scores ~1.

#include <span>
#include <vector>

#include "jnr/core_types.hpp"

namespace jnr {

struct RoiConfig {
  // RoI corners as fractions of (W, H).
  double left = 0.25;
  double top = 0.2;
  double right = 0.75;
  double bottom = 0.5;
  double threshold = 0.5;  // keep iff I* >= threshold
  double eps = 1e-7;

  void validate() const;
};

double i_star(const BBox& r1, const BBox& r2, double eps);

BBox roi_for_frame(int width, int height, const RoiConfig& cfg);

// `frames` is indexed by frame index (dense tracklet numbering).
std::vector<Detection> filter_by_roi(std::span<const Detection> dets, std::span<const Frame> frames,
                                     const RoiConfig& cfg);

}  // namespace jnr
