#pragma once

// Synthetic player-crop tracklets with ground-truth jersey numbers.
//
// Each frame shows a player in the target kit. In a fraction of frames the
// back number is readable; otherwise it is hidden (turned away) or partly
// covered by an occluder. Some frames without a readable number carry an
// opposition player's digit at the edge of the torso region.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "jnr/core_types.hpp"

namespace jnr {

struct SynthConfig {
  int tracklets = 200;
  int frames_min = 60;
  int frames_max = 140;
  int width = 120;
  int height = 150;
  double target_hue = 220.0;
  double opposition_hue = 0.0;
  double visibility = 0.12;
  double distractor_prob = 0.05;
  int blur_min = 0;
  int blur_max = 1;
  double occluder_prob = 0.3;
  double occluder_min = 0.85;  // covered fraction of the number's width
  double occluder_max = 1.0;
  int glyph_scale_min = 4;
  int glyph_scale_max = 5;
  std::uint64_t seed = 0;
  double split_train = 0.6;
  double split_val = 0.1;
  double split_test = 0.3;
  double holdout_fraction = 0.2;      // share of 0..99 reserved for the test split
  double test_unseen_fraction = 0.5;  // test tracklets drawing a held-out number
  double none_label_prob = 0.0;       // tracklets whose number is never shown

  void validate() const;
};

enum class MetaKind { kTarget, kDistractor };

struct FrameMeta {
  int frame_index = 0;
  bool visible = false;  // target number rendered and unoccluded
  std::optional<BBox> number_box;  // union of digit boxes when rendered
  std::vector<BBox> digit_boxes;
  std::vector<BBox> distractor_boxes;
};

struct TrackletPlan {
  std::string id;
  std::string split;
  JerseyLabel label;
  int frame_count = 0;
  std::uint64_t seed = 0;
};

struct SynthTracklet {
  Tracklet tracklet;
  std::string split;
  std::vector<FrameMeta> meta;
};

struct SynthMetadata {
  std::vector<TrackletPlan> tracklets;
  std::vector<int> heldout_numbers;
  std::vector<std::vector<FrameMeta>> frames;  // parallel to tracklets
};

// Deterministic split, label and seed assignment for every tracklet.
std::vector<TrackletPlan> plan_tracklets(const SynthConfig& cfg, std::vector<int>* heldout = nullptr);

SynthTracklet render_tracklet(const SynthConfig& cfg, const TrackletPlan& plan);

// Lit-pixel box of a digit glyph drawn with its cell's top-left at (x, y).
BBox glyph_box(int digit, int x, int y, int scale);
bool glyph_pixel(int digit, int col, int row);

// Writes <out>/<split>/<id>/frame_NNNNNN.ppm, <id>/meta.csv and <split>/gt.csv.
SynthMetadata generate(const SynthConfig& cfg, const std::filesystem::path& out);

void write_meta_csv(const std::filesystem::path& path, const std::vector<FrameMeta>& meta);
std::vector<FrameMeta> read_meta_csv(const std::filesystem::path& path, int frame_count);

}  // namespace jnr
