#pragma once

// Subcommand implementations behind the `jnr` CLI.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "jnr/pipeline/config.hpp"
#include "jnr/pipeline/dataset.hpp"
#include "jnr/pipeline/report.hpp"
#include "jnr/spatial_context.hpp"
#include "jnr/stnet/network.hpp"
#include "jnr/stnet/train.hpp"

namespace jnr {

struct PreparedTracklet {
  std::string id;
  std::optional<JerseyLabel> label;
  int frame_count = 0;
  bool kfid_run = false;
  KeyframeResult keyframes;
  KeyframeStats stats;
  std::map<int, stnet::Tensor> tensors;  // preprocessed frames, by index

  // Frames to sample from: keyframes when KfID ran and kept some, else all.
  std::vector<int> pool(bool use_kfid) const;
  bool falls_back(bool use_kfid) const { return use_kfid && keyframes.keyframe_indices.empty(); }
};

struct PrepareOptions {
  bool run_kfid = true;
  bool tensors_for_all_frames = false;  // otherwise keyframes only (all frames on fallback)
  bool tensors = true;
};

// Loads, runs KfID and preprocesses each tracklet of a split, in parallel
// over tracklets (cfg.threads). Output order follows the split index.
std::vector<PreparedTracklet> prepare_split(const RunConfig& cfg, const SplitIndex& split, const PrepareOptions& opts);

stnet::TrainResult train_prepared(const RunConfig& cfg, const std::vector<PreparedTracklet>& data, bool use_kfid,
                                  const std::function<void(int, double, double)>& on_iteration = {});

RunReport evaluate_prepared(const RunConfig& cfg, const stnet::NetConfig& net, const stnet::ModelParams& params,
                            const std::vector<PreparedTracklet>& data, bool use_kfid,
                            const std::optional<std::vector<int>>& train_labels);

void cmd_synth(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);

KeyframeStats cmd_kfid(const RunConfig& cfg, const std::filesystem::path& data, const std::filesystem::path& out,
                       std::ostream& log);

struct TrainSummary {
  int tracklets = 0;
  int fallback_tracklets = 0;
  std::vector<double> losses;
};

// metrics: `iteration,loss,lr` rows; empty path -> <checkpoint>.metrics.csv.
TrainSummary cmd_train(const RunConfig& cfg, const std::filesystem::path& data, const std::filesystem::path& checkpoint,
                       const std::filesystem::path& metrics, std::ostream& log);

// Writes predictions.csv and report.txt into `out` (default: checkpoint directory).
RunReport cmd_eval(const RunConfig& cfg, const std::filesystem::path& data, const std::filesystem::path& checkpoint,
                   const std::filesystem::path& out, std::ostream& log);

struct AblationResult {
  RunReport on;
  RunReport off;
  std::uint64_t sampler_seed = 0;
  std::uint64_t net_seed = 0;
  double delta_points() const { return (on.accuracy() - off.accuracy()) * 100.0; }
};

std::string format_ablation(const AblationResult& r);

// Trains and evaluates with KfID on and off under identical seeds and budgets.
AblationResult cmd_ablate(const RunConfig& cfg, const std::filesystem::path& data, const std::filesystem::path& out,
                          std::ostream& log);

// Labels present in <data>/<train split>/gt.csv, if that file exists.
std::optional<std::vector<int>> training_labels(const RunConfig& cfg, const std::filesystem::path& data);

}  // namespace jnr
