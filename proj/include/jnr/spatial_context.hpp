#pragma once

// Spatial-context-aware filtering of digit detections.
//
// Every detection crop is summarised by a normalized hue histogram. Within a
// frame, adjacent digit boxes with correlated histograms are merged into one
// whole-number box (LHC). Across the tracklet, histograms are clustered with
// average-link agglomeration and only the largest cluster survives (GHC); its
// frames are the keyframes.

#include <cstdint>
#include <span>
#include <vector>

#include "jnr/core_types.hpp"
#include "jnr/jnl.hpp"
#include "jnr/roi_filter.hpp"

namespace jnr {

struct HueHistogram {
  std::vector<double> bins;  // sums to 1 unless pixel_count == 0 (then uniform)
  long pixel_count = 0;

  bool degenerate() const { return pixel_count == 0; }
};

struct SpatialContextConfig {
  int bins = 30;
  double lhc_tau = 0.7;
  double lhc_gap = 1.0;   // max horizontal gap, in mean box widths
  double lhc_voff = 0.5;  // max |dy| of centers, in min box heights
  double ghc_tau = 0.7;

  void validate() const;
};

struct KeyframeResult {
  std::vector<Detection> kept_detections;
  std::vector<int> keyframe_indices;  // sorted, distinct
};

// Hexcone hue in degrees, [0, 360). Achromatic pixels map to 0.
double rgb_to_hue(std::uint8_t r, std::uint8_t g, std::uint8_t b);

// Histogram of the hues of pixels whose centers lie in [x1,x2) x [y1,y2).
HueHistogram hue_histogram(const Frame& frame, const BBox& box, int bins);

// Pearson correlation of the bin vectors. Zero-variance inputs give 1 when
// both are constant, otherwise 0.
double hist_correlation(const HueHistogram& a, const HueHistogram& b);

// All detections must share one frame_index. Output is sorted by left edge.
std::vector<Detection> lhc_merge(std::span<const Detection> dets, const Frame& frame,
                                 const SpatialContextConfig& cfg);

// Average-link agglomeration under distance 1 - correlation; clusters merge
// while their mean pairwise correlation is >= tau. Returns the ascending
// member indices of the selected cluster: most members, then highest mean
// intra-cluster correlation (1 for singletons), then lowest frame index, then
// lowest member index. Empty input gives an empty result.
std::vector<std::size_t> ghc_cluster(std::span<const HueHistogram> hists,
                                     std::span<const int> frame_indices, double tau);

KeyframeResult ghc_select(std::span<const Detection> dets, std::span<const Frame> frames,
                          const SpatialContextConfig& cfg);

KeyframeResult kfid(const Tracklet& t, const DetectorConfig& detector_cfg, const RoiConfig& roi_cfg,
                    const SpatialContextConfig& sc_cfg);

}  // namespace jnr
