#pragma once

// Two 11-way digit heads and the multi-task loss
//   L = 0.5 * (-log p1[d1]) + 0.5 * (-log p2[d2]),
// with probabilities floored at 1e-12 before the log.

#include <array>
#include <span>

#include "jnr/core_types.hpp"
#include "jnr/stnet/model.hpp"

namespace jnr::stnet {

inline constexpr double kProbabilityFloor = 1e-12;

struct PredictionDistribution {
  std::array<double, kDigitClasses> p1{};
  std::array<double, kDigitClasses> p2{};
};

std::array<double, kDigitClasses> softmax(std::span<const double, kDigitClasses> logits);

struct HeadLogits {
  std::array<double, kDigitClasses> z1{};
  std::array<double, kDigitClasses> z2{};
};

HeadLogits head_logits(std::span<const double> temporal, const ModelParams& params);
PredictionDistribution heads(std::span<const double> temporal, const ModelParams& params);

double loss(const PredictionDistribution& pred, DigitPair target);

// d(loss)/d(logits) for both heads, matching the floor convention of loss().
HeadLogits loss_logit_gradient(const PredictionDistribution& pred, DigitPair target);

// Accumulates head parameter gradients; d_temporal receives (+=) the input gradient.
void heads_backward(std::span<const double> temporal, const HeadLogits& d_logits, const ModelParams& params,
                    ModelParams& grads, std::span<double> d_temporal);

// Argmax per head (lowest class on ties), decoded to a jersey number.
DigitPair argmax_pair(const PredictionDistribution& pred);

}  // namespace jnr::stnet
