#pragma once

// Whole-sequence forward/backward: extractor per unique frame, bi-LSTM,
// digit heads, loss. Repeated frames in a sequence (cyclic padding) share one
// extractor pass; their feature gradients are summed before backprop.

#include <functional>
#include <span>
#include <vector>

#include "jnr/core_types.hpp"
#include "jnr/sampler.hpp"
#include "jnr/spatial_context.hpp"
#include "jnr/stnet/extractor.hpp"
#include "jnr/stnet/heads.hpp"
#include "jnr/stnet/model.hpp"
#include "jnr/stnet/temporal.hpp"

namespace jnr::stnet {

// A training/evaluation sequence: preprocessed frames in temporal order.
// Pointers may repeat; the referenced tensors must outlive the example.
struct Example {
  std::vector<const Tensor*> frames;
  DigitPair target;
};

PredictionDistribution forward_sequence(std::span<const Tensor* const> frames, const ModelParams& params,
                                        const NetConfig& cfg);

double example_loss(const Example& ex, const ModelParams& params, const NetConfig& cfg);

// Adds d(loss)/d(params) of one example into grads (unscaled); returns the loss.
double example_backward(const Example& ex, const ModelParams& params, const NetConfig& cfg, ModelParams& grads);

// Mean-loss gradients over a batch. Examples are processed on `threads`
// workers into per-example buffers that are summed in example order, so the
// result does not depend on the thread count.
class GradientEngine {
 public:
  GradientEngine(const NetConfig& cfg, int threads);
  // Overwrites grads with the batch-mean gradient; returns the mean loss.
  double compute(std::span<const Example> batch, const ModelParams& params, ModelParams& grads);

 private:
  NetConfig cfg_;
  int threads_;
  std::vector<ModelParams> per_example_;
  std::vector<double> losses_;
};

double backward(std::span<const Example> batch, const ModelParams& params, const NetConfig& cfg,
                ModelParams& grads, int threads = 1);
double batch_loss(std::span<const Example> batch, const ModelParams& params, const NetConfig& cfg);

struct TrackletPrediction {
  JerseyLabel label;
  DigitPair digits;
  PredictionDistribution distribution;
  std::vector<int> sampled_frames;
  bool fallback = false;  // keyframes were empty; sampled from all frames
};

// Supplies the preprocessed tensor of a frame index.
using FrameSource = std::function<const Tensor&(int frame_index)>;

// Even-mode sample of the keyframes (all frames when `keyframes` is empty),
// forward pass, per-head argmax, decode.
TrackletPrediction predict_frames(std::span<const int> keyframes, int frame_count, const FrameSource& source,
                                  const ModelParams& params, const NetConfig& cfg, const SamplerConfig& sampler_cfg);

TrackletPrediction predict_tracklet(const Tracklet& t, const KeyframeResult& keyframes, const ModelParams& params,
                                    const NetConfig& cfg, const SamplerConfig& sampler_cfg);

}  // namespace jnr::stnet
