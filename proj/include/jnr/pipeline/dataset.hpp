#pragma once

// On-disk dataset layout:
//   <split>/gt.csv                 tracklet_id,number
//   <split>/<id>/frame_NNNNNN.ppm  dense from 0
//   <split>/<id>/detections.csv    optional detector sidecar
//   <split>/<id>/meta.csv          optional generator metadata

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "jnr/core_types.hpp"

namespace jnr {

struct TrackletEntry {
  std::string id;
  std::filesystem::path dir;
  int frame_count = 0;
  std::optional<JerseyLabel> label;
};

struct SplitIndex {
  std::filesystem::path root;
  bool has_gt = false;
  std::vector<TrackletEntry> tracklets;  // sorted by id
};

// <data>/<split> when that directory exists, otherwise <data> itself.
std::filesystem::path resolve_split(const std::filesystem::path& data, const std::string& split);

std::map<std::string, JerseyLabel> read_gt_csv(const std::filesystem::path& path);

// Lists tracklet directories (those holding frame_000000.ppm) and attaches
// gt.csv labels when present. Every gt row must name an existing tracklet.
SplitIndex index_split(const std::filesystem::path& root);

std::filesystem::path frame_path(const std::filesystem::path& dir, int index);

// Frames plus detections.csv rows when the sidecar exists.
Tracklet load_tracklet(const TrackletEntry& entry);

}  // namespace jnr
