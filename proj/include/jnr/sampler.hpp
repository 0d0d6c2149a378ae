#pragma once

// Fixed-length frame sampling from a tracklet's keyframes, with a minimum
// index gap between chosen frames.

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "jnr/core_types.hpp"

namespace jnr {

enum class SampleMode { kRandom, kEven };

struct SamplerConfig {
  int length = 40;
  int min_gap = 2;
  std::uint64_t seed = 0;
  SampleMode mode = SampleMode::kRandom;

  void validate() const;
};

class NoKeyframesError : public Error {
 public:
  NoKeyframesError() : Error("no keyframes") {}
};

// keyframes: sorted ascending, distinct.
//
// random: a subset of size min(L, M) drawn uniformly among all subsets whose
//   consecutive members differ by >= min_gap, where M is the largest feasible
//   size; sorted.
// even: evenly spaced picks from the greedy left-to-right gap-respecting
//   thinning of the keyframes.
// When fewer than L frames are feasible, the selection is repeated
// cyclically until the output has length L.
//
// Throws NoKeyframesError on empty input.
std::vector<int> sample(std::span<const int> keyframes, const SamplerConfig& cfg);

// Stable 64-bit FNV-1a of a tracklet id.
std::uint64_t id_hash(std::string_view id);
// Per-tracklet seed: seed xor id_hash(id).
std::uint64_t tracklet_seed(std::uint64_t seed, std::string_view id);
// splitmix64 finaliser over a combined pair; used to derive per-iteration seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace jnr
