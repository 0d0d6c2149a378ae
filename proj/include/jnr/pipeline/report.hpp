#pragma once

// Keyframe statistics and evaluation reports.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace jnr {

struct KeyframeStats {
  long long tracklets = 0;
  long long frames = 0;
  long long keyframes = 0;
  long long empty_tracklets = 0;  // KfID kept nothing
  bool has_meta = false;
  long long visible_frames = 0;   // generator says the number is readable
  long long visible_kept = 0;     // ... and the frame is a keyframe

  void add(const KeyframeStats& o);
  double reduction_percent() const;  // (1 - keyframes/frames) * 100; 0 frames -> 0
  std::optional<double> visible_recall() const;
};

std::string format_kfid_stats(const KeyframeStats& s);

struct PredictionRow {
  std::string tracklet_id;
  int pred = -1;
  int gt = -1;
  bool correct = false;
  bool fallback = false;  // sampled from all frames because KfID kept none
  bool unseen = false;    // gt label never occurs in the training split
};

struct RunReport {
  bool kfid_enabled = true;
  bool train_labels_known = false;
  std::vector<PredictionRow> rows;
  KeyframeStats keyframes;

  long long correct() const;
  double accuracy() const;
  std::optional<double> unseen_accuracy() const;
  long long fallback_count() const;
};

// tracklet_id,pred,gt,correct
void write_predictions_csv(const std::filesystem::path& path, const RunReport& r);
std::vector<PredictionRow> read_predictions_csv(const std::filesystem::path& path);

std::string format_report(const RunReport& r);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace jnr
