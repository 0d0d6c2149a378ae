#pragma once

// Adam training loop with a step-decay learning-rate schedule.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "jnr/sampler.hpp"
#include "jnr/stnet/network.hpp"

namespace jnr::stnet {

// lr = base * factor^floor(min(iteration, until) / every)
double learning_rate_at(const NetConfig& cfg, int iteration);

class Adam {
 public:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEpsilon = 1e-8;

  explicit Adam(const NetConfig& cfg);
  void step(ModelParams& params, const ModelParams& grads, double lr);
  int steps() const { return t_; }

 private:
  ModelParams m_;
  ModelParams v_;
  double weight_decay_ = 0.0;
  int t_ = 0;
};

// One labeled tracklet prepared for training: the frame pool to sample from
// (keyframes, or all frames when KfID is off or found nothing) and the
// preprocessed tensor of each pool frame.
struct TrainItem {
  std::string id;
  std::vector<int> pool;       // sorted frame indices
  std::vector<const Tensor*> frames;  // parallel to pool; must outlive training
  DigitPair target;
};

struct TrainOptions {
  NetConfig net;
  SamplerConfig sampler;  // mode is forced to random
  int threads = 1;
  // Called after every iteration with (iteration, mean batch loss, lr).
  std::function<void(int, double, double)> on_iteration;
};

struct TrainResult {
  ModelParams params;
  std::vector<double> losses;
};

// Batches walk a per-epoch permutation of the items (seeded from net.seed);
// each example's frames are a fresh random sample per iteration.
// Throws Error on a non-finite loss or parameters.
TrainResult train(std::span<const TrainItem> items, ModelParams params_init, const TrainOptions& opts);

// Builds the sequence example of item at a given iteration.
Example make_example(const TrainItem& item, const SamplerConfig& sampler, int iteration);

}  // namespace jnr::stnet
