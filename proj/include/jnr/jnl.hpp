#pragma once

// Jersey number localization: a pluggable digit detector over frames.
//
// Two implementations ship: a file-backed detector that replays a per-tracklet
// sidecar of externally produced boxes, and a heuristic connected-component
// detector that is sufficient for the synthetic renders.

#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "jnr/core_types.hpp"

namespace jnr {

enum class DetectorKind { kFileBacked, kHeuristic };

struct DetectorConfig {
  DetectorKind kind = DetectorKind::kHeuristic;
  double min_confidence = 0.25;
  // Heuristic detector: a pixel is foreground when its luminance exceeds the
  // mean of its (2r+1)^2 neighbourhood by more than `threshold` levels.
  int threshold = 25;
  int background_radius = 8;
  int min_area = 30;
  int max_area = 2500;
  // Bounds on component height / width.
  double min_aspect = 1.0;
  double max_aspect = 4.0;

  void validate() const;
};

class Detector {
 public:
  virtual ~Detector() = default;
  // Detections are clipped to the frame and carry frame.index().
  virtual std::vector<Detection> localize(const Frame& frame) const = 0;
};

class HeuristicDetector final : public Detector {
 public:
  explicit HeuristicDetector(DetectorConfig cfg);
  std::vector<Detection> localize(const Frame& frame) const override;

 private:
  DetectorConfig cfg_;
};

// Replays sidecar rows. Frames without rows yield no detections.
class FileBackedDetector final : public Detector {
 public:
  FileBackedDetector(std::vector<Detection> rows, DetectorConfig cfg);
  std::vector<Detection> localize(const Frame& frame) const override;

 private:
  std::vector<Detection> rows_;
  DetectorConfig cfg_;
};

std::unique_ptr<Detector> make_detector(const DetectorConfig& cfg,
                                        std::span<const Detection> sidecar = {});

std::vector<Detection> localize(const Frame& frame, const DetectorConfig& cfg,
                                std::span<const Detection> sidecar = {});

// File-backed configs replay t.detections.
std::vector<Detection> localize_tracklet(const Tracklet& t, const DetectorConfig& cfg);

// Sidecar format: header row, then `frame_index,x1,y1,x2,y2,confidence`.
// Malformed rows raise Error naming the file and line.
std::vector<Detection> read_detection_sidecar(const std::filesystem::path& path);
void write_detection_sidecar(const std::filesystem::path& path, std::span<const Detection> dets);

}  // namespace jnr
