#pragma once

// Bidirectional LSTM over per-frame feature vectors. The temporal vector is
// [final forward hidden state, final backward hidden state].

#include <span>
#include <vector>

#include "jnr/stnet/model.hpp"

namespace jnr::stnet {

struct LstmStepCache {
  std::vector<double> gates;  // activated i, f, g, o (4h)
  std::vector<double> c;
  std::vector<double> tanh_c;
  std::vector<double> h;
};

struct LstmCache {
  std::vector<const double*> inputs;  // in processing order
  std::vector<LstmStepCache> steps;
};

// Runs one direction over `inputs` in the given order; returns the final h.
const std::vector<double>& lstm_forward(std::span<const double* const> inputs, std::size_t input_dim,
                                        const LstmParams& p, std::size_t hidden, LstmCache& cache);

// d_h_final: gradient w.r.t. the final hidden state. d_inputs[k] (same order
// as the forward inputs) receives the input gradients (accumulated).
void lstm_backward(const LstmCache& cache, std::span<const double> d_h_final, std::size_t input_dim,
                   const LstmParams& p, std::size_t hidden, LstmParams& grads,
                   std::span<double* const> d_inputs);

struct TemporalCache {
  LstmCache fwd;
  LstmCache bwd;
  std::vector<double> output;  // 2h
};

const std::vector<double>& temporal_forward(std::span<const double* const> features, const ModelParams& params,
                                            const NetConfig& cfg, TemporalCache& cache);

// d_features[t] accumulates d(loss)/d(features[t]).
void temporal_backward(const TemporalCache& cache, std::span<const double> d_output, const ModelParams& params,
                       const NetConfig& cfg, ModelParams& grads, std::span<double* const> d_features);

// Convenience overload. Throws Error on an empty sequence.
std::vector<double> temporal_forward(std::span<const std::vector<double>> features, const ModelParams& params,
                                     const NetConfig& cfg);

}  // namespace jnr::stnet
