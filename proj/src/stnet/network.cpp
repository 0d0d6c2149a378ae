#include "jnr/stnet/network.hpp"

#include <cmath>
#include <map>
#include <numeric>
#include <thread>
#include <unordered_map>

namespace jnr::stnet {
namespace {

struct UniqueFrames {
  std::vector<const Tensor*> unique;
  std::vector<std::size_t> slot;  // sequence position -> unique index
};

UniqueFrames dedupe(std::span<const Tensor* const> frames) {
  UniqueFrames u;
  std::unordered_map<const Tensor*, std::size_t> seen;
  for (const Tensor* f : frames) {
    auto [it, inserted] = seen.try_emplace(f, u.unique.size());
    if (inserted) u.unique.push_back(f);
    u.slot.push_back(it->second);
  }
  return u;
}

struct SequenceWorkspace {
  std::vector<ExtractorCache> extractor;
  TemporalCache temporal;
};

thread_local SequenceWorkspace tls_workspace;

}  // namespace

PredictionDistribution forward_sequence(std::span<const Tensor* const> frames, const ModelParams& params,
                                        const NetConfig& cfg) {
  if (frames.empty()) throw Error("forward_sequence: empty sequence");
  const UniqueFrames u = dedupe(frames);
  SequenceWorkspace& ws = tls_workspace;
  if (ws.extractor.empty()) ws.extractor.resize(1);
  std::vector<std::vector<double>> feats;
  for (const Tensor* f : u.unique) feats.push_back(extractor_forward(*f, params, cfg, ws.extractor[0]));
  std::vector<const double*> seq;
  for (auto s : u.slot) seq.push_back(feats[s].data());
  const auto& temporal = temporal_forward(seq, params, cfg, ws.temporal);
  return heads(temporal, params);
}

double example_loss(const Example& ex, const ModelParams& params, const NetConfig& cfg) {
  return loss(forward_sequence(ex.frames, params, cfg), ex.target);
}

double example_backward(const Example& ex, const ModelParams& params, const NetConfig& cfg, ModelParams& grads) {
  if (ex.frames.empty()) throw Error("example has no frames");
  const UniqueFrames u = dedupe(ex.frames);
  SequenceWorkspace& ws = tls_workspace;
  if (ws.extractor.size() < u.unique.size()) ws.extractor.resize(u.unique.size());
  for (std::size_t k = 0; k < u.unique.size(); ++k) extractor_forward(*u.unique[k], params, cfg, ws.extractor[k]);
  std::vector<const double*> seq;
  for (auto s : u.slot) seq.push_back(ws.extractor[s].features.data());
  const std::vector<double> temporal = temporal_forward(seq, params, cfg, ws.temporal);
  const HeadLogits z = head_logits(temporal, params);
  const PredictionDistribution pred{softmax(z.z1), softmax(z.z2)};
  const double l = loss(pred, ex.target);

  const HeadLogits dz = loss_logit_gradient(pred, ex.target);
  std::vector<double> d_temporal(temporal.size(), 0.0);
  heads_backward(temporal, dz, params, grads, d_temporal);

  const auto d = static_cast<std::size_t>(cfg.feature_dim);
  std::vector<std::vector<double>> d_unique(u.unique.size(), std::vector<double>(d, 0.0));
  std::vector<double*> d_seq;
  for (auto s : u.slot) d_seq.push_back(d_unique[s].data());
  temporal_backward(ws.temporal, d_temporal, params, cfg, grads, d_seq);
  for (std::size_t k = 0; k < u.unique.size(); ++k) extractor_backward(ws.extractor[k], d_unique[k], params, grads);
  return l;
}

GradientEngine::GradientEngine(const NetConfig& cfg, int threads) : cfg_(cfg), threads_(std::max(1, threads)) {}

double GradientEngine::compute(std::span<const Example> batch, const ModelParams& params, ModelParams& grads) {
  if (batch.empty()) throw Error("empty batch");
  const std::size_t n = batch.size();
  while (per_example_.size() < n) per_example_.push_back(ModelParams::zeros(cfg_));
  losses_.assign(n, 0.0);
  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < n; i += stride) {
      per_example_[i].set_zero();
      losses_[i] = example_backward(batch[i], params, cfg_, per_example_[i]);
    }
  };
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads_), n);
  if (workers <= 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work, t, workers);
  }
  grads = ModelParams::zeros(cfg_);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    grads.add_scaled(per_example_[i], 1.0);
    total += losses_[i];
  }
  const double inv = 1.0 / static_cast<double>(n);
  for (auto& [name, t] : grads.tensors())
    for (auto& v : t->data) v *= inv;
  return total * inv;
}

double backward(std::span<const Example> batch, const ModelParams& params, const NetConfig& cfg, ModelParams& grads,
                int threads) {
  GradientEngine engine(cfg, threads);
  return engine.compute(batch, params, grads);
}

double batch_loss(std::span<const Example> batch, const ModelParams& params, const NetConfig& cfg) {
  if (batch.empty()) throw Error("empty batch");
  double total = 0.0;
  for (const auto& ex : batch) total += example_loss(ex, params, cfg);
  return total / static_cast<double>(batch.size());
}

TrackletPrediction predict_frames(std::span<const int> keyframes, int frame_count, const FrameSource& source,
                                  const ModelParams& params, const NetConfig& cfg, const SamplerConfig& sampler_cfg) {
  TrackletPrediction out;
  SamplerConfig even = sampler_cfg;
  even.mode = SampleMode::kEven;
  std::vector<int> pool(keyframes.begin(), keyframes.end());
  if (pool.empty()) {
    if (frame_count < 1) throw Error("tracklet has no frames");
    pool.resize(frame_count);
    std::iota(pool.begin(), pool.end(), 0);
    out.fallback = true;
  }
  out.sampled_frames = sample(pool, even);
  std::vector<const Tensor*> seq;
  for (int idx : out.sampled_frames) seq.push_back(&source(idx));
  out.distribution = forward_sequence(seq, params, cfg);
  out.digits = argmax_pair(out.distribution);
  out.label = decode_pair(out.digits);
  return out;
}

TrackletPrediction predict_tracklet(const Tracklet& t, const KeyframeResult& keyframes, const ModelParams& params,
                                    const NetConfig& cfg, const SamplerConfig& sampler_cfg) {
  std::map<int, Tensor> cache;
  FrameSource source = [&](int idx) -> const Tensor& {
    auto it = cache.find(idx);
    if (it == cache.end()) it = cache.emplace(idx, preprocess(t.frames.at(idx), cfg)).first;
    return it->second;
  };
  return predict_frames(keyframes.keyframe_indices, t.length(), source, params, cfg, sampler_cfg);
}

}  // namespace jnr::stnet
