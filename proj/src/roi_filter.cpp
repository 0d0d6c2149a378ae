#include "jnr/roi_filter.hpp"

#include <algorithm>
#include <string>

namespace jnr {

void RoiConfig::validate() const {
  if (!(0.0 <= left && left < right && right <= 1.0)) throw Error("roi: require 0 <= left < right <= 1");
  if (!(0.0 <= top && top < bottom && bottom <= 1.0)) throw Error("roi: require 0 <= top < bottom <= 1");
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw Error("roi.threshold must lie in [0,1]");
  if (!(eps > 0.0)) throw Error("roi.eps must be positive");
}

double i_star(const BBox& r1, const BBox& r2, double eps) {
  const auto inter = intersect(r1, r2);
  if (!inter) return 0.0;
  return area(*inter) / (std::min(area(r1), area(r2)) + eps);
}

BBox roi_for_frame(int width, int height, const RoiConfig& cfg) {
  return {cfg.left * width, cfg.top * height, cfg.right * width, cfg.bottom * height};
}

std::vector<Detection> filter_by_roi(std::span<const Detection> dets, std::span<const Frame> frames,
                                     const RoiConfig& cfg) {
  std::vector<Detection> kept;
  for (const auto& d : dets) {
    if (d.frame_index < 0 || static_cast<std::size_t>(d.frame_index) >= frames.size()) {
      throw Error("detection references missing frame " + std::to_string(d.frame_index));
    }
    const Frame& f = frames[d.frame_index];
    if (i_star(roi_for_frame(f.width(), f.height(), cfg), d.box, cfg.eps) >= cfg.threshold) {
      kept.push_back(d);
    }
  }
  return kept;
}

}  // namespace jnr
