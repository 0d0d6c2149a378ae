#include "jnr/stnet/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace jnr::stnet {

double learning_rate_at(const NetConfig& cfg, int iteration) {
  const int capped = std::min(std::max(iteration, 0), cfg.lr_decay_until);
  const int decays = capped / cfg.lr_decay_every;
  return cfg.learning_rate * std::pow(cfg.lr_decay_factor, decays);
}

Adam::Adam(const NetConfig& cfg)
    : m_(ModelParams::zeros(cfg)), v_(ModelParams::zeros(cfg)), weight_decay_(cfg.weight_decay) {}

void Adam::step(ModelParams& params, const ModelParams& grads, double lr) {
  ++t_;
  const double c1 = 1.0 - std::pow(kBeta1, t_);
  const double c2 = 1.0 - std::pow(kBeta2, t_);
  auto p = params.tensors();
  const auto g = grads.tensors();
  auto m = m_.tensors();
  auto v = v_.tensors();
  for (std::size_t k = 0; k < p.size(); ++k) {
    auto& pd = p[k].second->data;
    const auto& gd = g[k].second->data;
    auto& md = m[k].second->data;
    auto& vd = v[k].second->data;
    if (gd.size() != pd.size()) throw Error("adam: gradient shape mismatch for " + p[k].first);
    // Decoupled decay on weights only; biases are left alone.
    const bool decay = weight_decay_ > 0.0 && p[k].first.find("bias") == std::string::npos;
    for (std::size_t i = 0; i < pd.size(); ++i) {
      md[i] = kBeta1 * md[i] + (1.0 - kBeta1) * gd[i];
      vd[i] = kBeta2 * vd[i] + (1.0 - kBeta2) * gd[i] * gd[i];
      if (decay) pd[i] -= lr * weight_decay_ * pd[i];
      pd[i] -= lr * (md[i] / c1) / (std::sqrt(vd[i] / c2) + kEpsilon);
    }
  }
}

Example make_example(const TrainItem& item, const SamplerConfig& sampler, int iteration) {
  SamplerConfig cfg = sampler;
  cfg.mode = SampleMode::kRandom;
  cfg.seed = mix_seed(tracklet_seed(sampler.seed, item.id), static_cast<std::uint64_t>(iteration));
  Example ex;
  ex.target = item.target;
  for (int idx : sample(item.pool, cfg)) {
    auto it = std::lower_bound(item.pool.begin(), item.pool.end(), idx);
    ex.frames.push_back(item.frames[static_cast<std::size_t>(it - item.pool.begin())]);
  }
  return ex;
}

TrainResult train(std::span<const TrainItem> items, ModelParams params_init, const TrainOptions& opts) {
  opts.net.validate();
  opts.sampler.validate();
  if (items.empty()) throw Error("training set is empty");
  for (const auto& item : items) {
    if (item.pool.empty() || item.pool.size() != item.frames.size())
      throw Error("training item " + item.id + " has no frames");
  }

  TrainResult result{std::move(params_init), {}};
  Adam adam(opts.net);
  GradientEngine engine(opts.net, opts.threads);
  ModelParams grads = ModelParams::zeros(opts.net);

  std::vector<std::size_t> order(items.size());
  std::size_t cursor = order.size();
  std::uint64_t epoch = 0;
  const auto batch_size = static_cast<std::size_t>(opts.net.batch_size);

  for (int it = 0; it < opts.net.iterations; ++it) {
    std::vector<Example> batch;
    batch.reserve(batch_size);
    while (batch.size() < batch_size) {
      if (cursor == order.size()) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::mt19937_64 rng(mix_seed(opts.net.seed, epoch++));
        // Fisher-Yates with an explicit draw so the permutation does not depend
        // on the standard library's shuffle implementation.
        for (std::size_t i = order.size(); i > 1; --i) {
          std::uniform_int_distribution<std::size_t> pick(0, i - 1);
          std::swap(order[i - 1], order[pick(rng)]);
        }
        cursor = 0;
      }
      batch.push_back(make_example(items[order[cursor++]], opts.sampler, it));
    }

    const double lr = learning_rate_at(opts.net, it);
    const double l = engine.compute(batch, result.params, grads);
    if (!std::isfinite(l)) throw Error("training diverged: non-finite loss at iteration " + std::to_string(it));
    adam.step(result.params, grads, lr);
    if (!result.params.all_finite())
      throw Error("training diverged: non-finite parameters at iteration " + std::to_string(it));
    result.losses.push_back(l);
    if (opts.on_iteration) opts.on_iteration(it, l, lr);
  }
  return result;
}

}  // namespace jnr::stnet
