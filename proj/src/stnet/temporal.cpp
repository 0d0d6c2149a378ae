#include "jnr/stnet/temporal.hpp"

#include <cmath>

#include "jnr/core_types.hpp"
#include "jnr/simd/kernels.hpp"

namespace jnr::stnet {
namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

const std::vector<double>& lstm_forward(std::span<const double* const> inputs, std::size_t input_dim,
                                        const LstmParams& p, std::size_t hidden, LstmCache& cache) {
  const std::size_t h = hidden;
  cache.inputs.assign(inputs.begin(), inputs.end());
  cache.steps.resize(inputs.size());
  std::vector<double> h_prev(h, 0.0), c_prev(h, 0.0);
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    LstmStepCache& s = cache.steps[t];
    s.gates.assign(p.bias.data.begin(), p.bias.data.end());
    simd::gemv(p.w_in.ptr(), 4 * h, input_dim, inputs[t], s.gates.data());
    simd::gemv(p.w_rec.ptr(), 4 * h, h, h_prev.data(), s.gates.data());
    s.c.resize(h);
    s.tanh_c.resize(h);
    s.h.resize(h);
    for (std::size_t j = 0; j < h; ++j) {
      const double i = sigmoid(s.gates[j]);
      const double f = sigmoid(s.gates[h + j]);
      const double g = std::tanh(s.gates[2 * h + j]);
      const double o = sigmoid(s.gates[3 * h + j]);
      s.gates[j] = i;
      s.gates[h + j] = f;
      s.gates[2 * h + j] = g;
      s.gates[3 * h + j] = o;
      s.c[j] = f * c_prev[j] + i * g;
      s.tanh_c[j] = std::tanh(s.c[j]);
      s.h[j] = o * s.tanh_c[j];
    }
    h_prev = s.h;
    c_prev = s.c;
  }
  return cache.steps.back().h;
}

void lstm_backward(const LstmCache& cache, std::span<const double> d_h_final, std::size_t input_dim,
                   const LstmParams& p, std::size_t hidden, LstmParams& grads, std::span<double* const> d_inputs) {
  const std::size_t h = hidden;
  const std::vector<double> zeros(h, 0.0);
  std::vector<double> dh(d_h_final.begin(), d_h_final.end());
  std::vector<double> dc(h, 0.0), dz(4 * h), dh_prev(h);
  for (std::size_t t = cache.steps.size(); t-- > 0;) {
    const LstmStepCache& s = cache.steps[t];
    const std::vector<double>& c_prev = t > 0 ? cache.steps[t - 1].c : zeros;
    const std::vector<double>& h_prev = t > 0 ? cache.steps[t - 1].h : zeros;
    for (std::size_t j = 0; j < h; ++j) {
      const double i = s.gates[j], f = s.gates[h + j], g = s.gates[2 * h + j], o = s.gates[3 * h + j];
      const double tc = s.tanh_c[j];
      dc[j] += dh[j] * o * (1.0 - tc * tc);
      dz[j] = dc[j] * g * i * (1.0 - i);
      dz[h + j] = dc[j] * c_prev[j] * f * (1.0 - f);
      dz[2 * h + j] = dc[j] * i * (1.0 - g * g);
      dz[3 * h + j] = dh[j] * tc * o * (1.0 - o);
      dc[j] *= f;
    }
    simd::ger(grads.w_in.ptr(), 4 * h, input_dim, dz.data(), cache.inputs[t]);
    simd::ger(grads.w_rec.ptr(), 4 * h, h, dz.data(), h_prev.data());
    for (std::size_t k = 0; k < 4 * h; ++k) grads.bias[k] += dz[k];
    simd::gemv_t(p.w_in.ptr(), 4 * h, input_dim, dz.data(), d_inputs[t]);
    std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
    simd::gemv_t(p.w_rec.ptr(), 4 * h, h, dz.data(), dh_prev.data());
    dh.swap(dh_prev);
  }
}

const std::vector<double>& temporal_forward(std::span<const double* const> features, const ModelParams& params,
                                            const NetConfig& cfg, TemporalCache& cache) {
  if (features.empty()) throw Error("temporal_forward: empty sequence");
  const auto d = static_cast<std::size_t>(cfg.feature_dim);
  const auto h = static_cast<std::size_t>(cfg.hidden);
  if (params.fwd.w_in.shape != std::vector<std::size_t>{4 * h, d}) {
    throw Error("recurrent parameters do not match net config");
  }
  std::vector<const double*> reversed(features.rbegin(), features.rend());
  const auto& hf = lstm_forward(features, d, params.fwd, h, cache.fwd);
  const auto& hb = lstm_forward(reversed, d, params.bwd, h, cache.bwd);
  cache.output.assign(hf.begin(), hf.end());
  cache.output.insert(cache.output.end(), hb.begin(), hb.end());
  return cache.output;
}

void temporal_backward(const TemporalCache& cache, std::span<const double> d_output, const ModelParams& params,
                       const NetConfig& cfg, ModelParams& grads, std::span<double* const> d_features) {
  const auto d = static_cast<std::size_t>(cfg.feature_dim);
  const auto h = static_cast<std::size_t>(cfg.hidden);
  lstm_backward(cache.fwd, d_output.subspan(0, h), d, params.fwd, h, grads.fwd, d_features);
  std::vector<double*> reversed(d_features.rbegin(), d_features.rend());
  lstm_backward(cache.bwd, d_output.subspan(h, h), d, params.bwd, h, grads.bwd, reversed);
}

std::vector<double> temporal_forward(std::span<const std::vector<double>> features, const ModelParams& params,
                                     const NetConfig& cfg) {
  std::vector<const double*> ptrs;
  for (const auto& f : features) {
    if (f.size() != static_cast<std::size_t>(cfg.feature_dim)) throw Error("feature length does not match net config");
    ptrs.push_back(f.data());
  }
  TemporalCache cache;
  return temporal_forward(ptrs, params, cfg, cache);
}

}  // namespace jnr::stnet
