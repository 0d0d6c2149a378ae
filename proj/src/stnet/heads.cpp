#include "jnr/stnet/heads.hpp"

#include <algorithm>
#include <cmath>

#include "jnr/simd/kernels.hpp"

namespace jnr::stnet {

std::array<double, kDigitClasses> softmax(std::span<const double, kDigitClasses> logits) {
  std::array<double, kDigitClasses> p{};
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (int i = 0; i < kDigitClasses; ++i) sum += (p[i] = std::exp(logits[i] - mx));
  for (auto& v : p) v /= sum;
  return p;
}

HeadLogits head_logits(std::span<const double> temporal, const ModelParams& params) {
  const std::size_t n = temporal.size();
  if (params.head1_w.shape != std::vector<std::size_t>{kDigitClasses, n}) {
    throw Error("head parameters do not match temporal feature size");
  }
  HeadLogits z;
  for (int k = 0; k < kDigitClasses; ++k) {
    z.z1[k] = params.head1_b[k] + simd::dot(params.head1_w.ptr() + k * n, temporal.data(), n);
    z.z2[k] = params.head2_b[k] + simd::dot(params.head2_w.ptr() + k * n, temporal.data(), n);
  }
  return z;
}

PredictionDistribution heads(std::span<const double> temporal, const ModelParams& params) {
  const HeadLogits z = head_logits(temporal, params);
  return {softmax(z.z1), softmax(z.z2)};
}

double loss(const PredictionDistribution& pred, DigitPair target) {
  if (!target.valid()) throw Error("loss: digit target outside 0..10");
  return 0.5 * -std::log(std::max(pred.p1[target.d1], kProbabilityFloor)) +
         0.5 * -std::log(std::max(pred.p2[target.d2], kProbabilityFloor));
}

HeadLogits loss_logit_gradient(const PredictionDistribution& pred, DigitPair target) {
  HeadLogits g;
  auto fill = [](const std::array<double, kDigitClasses>& p, int t, std::array<double, kDigitClasses>& out) {
    // Below the floor the loss term is constant.
    if (p[t] < kProbabilityFloor) {
      out.fill(0.0);
      return;
    }
    for (int k = 0; k < kDigitClasses; ++k) out[k] = 0.5 * (p[k] - (k == t ? 1.0 : 0.0));
  };
  fill(pred.p1, target.d1, g.z1);
  fill(pred.p2, target.d2, g.z2);
  return g;
}

void heads_backward(std::span<const double> temporal, const HeadLogits& d_logits, const ModelParams& params,
                    ModelParams& grads, std::span<double> d_temporal) {
  const std::size_t n = temporal.size();
  simd::ger(grads.head1_w.ptr(), kDigitClasses, n, d_logits.z1.data(), temporal.data());
  simd::ger(grads.head2_w.ptr(), kDigitClasses, n, d_logits.z2.data(), temporal.data());
  for (int k = 0; k < kDigitClasses; ++k) {
    grads.head1_b[k] += d_logits.z1[k];
    grads.head2_b[k] += d_logits.z2[k];
  }
  simd::gemv_t(params.head1_w.ptr(), kDigitClasses, n, d_logits.z1.data(), d_temporal.data());
  simd::gemv_t(params.head2_w.ptr(), kDigitClasses, n, d_logits.z2.data(), d_temporal.data());
}

DigitPair argmax_pair(const PredictionDistribution& pred) {
  auto am = [](const std::array<double, kDigitClasses>& p) {
    return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
  };
  return {am(pred.p1), am(pred.p2)};
}

}  // namespace jnr::stnet
