#include "jnr/sampler.hpp"

#include <algorithm>
#include <random>

namespace jnr {

void SamplerConfig::validate() const {
  if (length < 1) throw Error("sampler.length must be >= 1");
  if (min_gap < 0) throw Error("sampler.min_gap must be >= 0");
}

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::vector<int> cycle_to_length(std::vector<int> chosen, int length) {
  const std::size_t m = chosen.size();
  for (std::size_t i = 0; chosen.size() < static_cast<std::size_t>(length); ++i) chosen.push_back(chosen[i % m]);
  return chosen;
}

std::vector<int> sample_random(std::span<const int> keys, const SamplerConfig& cfg) {
  const std::size_t n = keys.size();
  std::vector<std::size_t> next(n);
  for (std::size_t i = 0, j = 0; i < n; ++i) {
    j = std::max(j, i + 1);
    while (j < n && keys[j] - keys[i] < cfg.min_gap) ++j;
    next[i] = j;
  }
  // count[i][r]: number of feasible r-subsets drawn from positions >= i.
  const std::size_t k_cap = static_cast<std::size_t>(cfg.length);
  std::vector<double> count((n + 1) * (k_cap + 1), 0.0);
  auto at = [&](std::size_t i, std::size_t r) -> double& { return count[i * (k_cap + 1) + r]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = 1.0;
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t r = 1; r <= k_cap; ++r) at(i, r) = at(i + 1, r) + at(next[i], r - 1);
  }
  std::size_t k = k_cap;
  while (at(0, k) == 0.0) --k;

  std::mt19937_64 rng(cfg.seed);
  std::vector<int> chosen;
  for (std::size_t i = 0, r = k; r > 0; ++i) {
    const double p_take = at(next[i], r - 1) / at(i, r);
    // A skip must leave a feasible completion; guards p_take rounding below 1.
    if (at(i + 1, r) == 0.0 || uniform01(rng) < p_take) {
      chosen.push_back(keys[i]);
      --r;
      i = next[i] - 1;
    }
  }
  return cycle_to_length(std::move(chosen), cfg.length);
}

std::vector<int> sample_even(std::span<const int> keys, const SamplerConfig& cfg) {
  std::vector<int> thinned{keys.front()};
  for (std::size_t i = 1; i < keys.size(); ++i) {
    if (keys[i] - thinned.back() >= cfg.min_gap) thinned.push_back(keys[i]);
  }
  const std::size_t m = thinned.size();
  const std::size_t len = static_cast<std::size_t>(cfg.length);
  if (m < len) return cycle_to_length(std::move(thinned), cfg.length);
  std::vector<int> out;
  for (std::size_t i = 0; i < len; ++i) out.push_back(thinned[i * m / len]);
  return out;
}

}  // namespace

std::vector<int> sample(std::span<const int> keyframes, const SamplerConfig& cfg) {
  cfg.validate();
  if (keyframes.empty()) throw NoKeyframesError();
  for (std::size_t i = 1; i < keyframes.size(); ++i) {
    if (keyframes[i] <= keyframes[i - 1]) throw Error("keyframes must be sorted and distinct");
  }
  return cfg.mode == SampleMode::kEven ? sample_even(keyframes, cfg) : sample_random(keyframes, cfg);
}

std::uint64_t id_hash(std::string_view id) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : id) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t tracklet_seed(std::uint64_t seed, std::string_view id) { return seed ^ id_hash(id); }

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace jnr
