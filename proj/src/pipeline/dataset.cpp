#include "jnr/pipeline/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "jnr/jnl.hpp"
#include "jnr/pipeline/image_io.hpp"

namespace jnr {

namespace fs = std::filesystem;

fs::path resolve_split(const fs::path& data, const std::string& split) {
  const fs::path candidate = data / split;
  if (fs::is_directory(candidate)) return candidate;
  return data;
}

std::map<std::string, JerseyLabel> read_gt_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::map<std::string, JerseyLabel> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (line_no == 1) {
      if (line != "tracklet_id,number") throw Error(where + ": expected header 'tracklet_id,number'");
      continue;
    }
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
      throw Error(where + ": expected 2 fields");
    const std::string id = line.substr(0, comma);
    int number = 0;
    try {
      std::size_t used = 0;
      number = std::stoi(line.substr(comma + 1), &used);
      if (used != line.size() - comma - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error(where + ": malformed number");
    }
    if (id.empty()) throw Error(where + ": empty tracklet id");
    try {
      if (!out.emplace(id, JerseyLabel(number)).second) throw Error(where + ": duplicate tracklet " + id);
    } catch (const Error& e) {
      if (std::string(e.what()).rfind(where, 0) == 0) throw;
      throw Error(where + ": " + e.what());
    }
  }
  return out;
}

fs::path frame_path(const fs::path& dir, int index) {
  char name[32];
  std::snprintf(name, sizeof name, "frame_%06d.ppm", index);
  return dir / name;
}

SplitIndex index_split(const fs::path& root) {
  if (!fs::is_directory(root)) throw Error("dataset directory not found: " + root.string());
  SplitIndex idx;
  idx.root = root;
  for (const auto& e : fs::directory_iterator(root)) {
    if (!e.is_directory() || !fs::exists(frame_path(e.path(), 0))) continue;
    TrackletEntry t;
    t.id = e.path().filename().string();
    t.dir = e.path();
    while (fs::exists(frame_path(t.dir, t.frame_count))) ++t.frame_count;
    idx.tracklets.push_back(std::move(t));
  }
  std::sort(idx.tracklets.begin(), idx.tracklets.end(),
            [](const TrackletEntry& a, const TrackletEntry& b) { return a.id < b.id; });
  const fs::path gt = root / "gt.csv";
  if (fs::exists(gt)) {
    idx.has_gt = true;
    auto labels = read_gt_csv(gt);
    for (auto& t : idx.tracklets) {
      auto it = labels.find(t.id);
      if (it == labels.end()) continue;
      t.label = it->second;
      labels.erase(it);
    }
    if (!labels.empty()) throw Error(gt.string() + ": tracklet " + labels.begin()->first + " has no frame directory");
  }
  return idx;
}

Tracklet load_tracklet(const TrackletEntry& entry) {
  Tracklet t;
  t.id = entry.id;
  t.label = entry.label;
  t.frames.reserve(static_cast<std::size_t>(entry.frame_count));
  for (int i = 0; i < entry.frame_count; ++i) t.frames.push_back(read_ppm(frame_path(entry.dir, i), i));
  const fs::path sidecar = entry.dir / "detections.csv";
  if (fs::exists(sidecar)) t.detections = read_detection_sidecar(sidecar);
  t.validate();
  return t;
}

}  // namespace jnr
