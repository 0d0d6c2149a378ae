#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "jnr/sampler.hpp"

using namespace jnr;

namespace {

SamplerConfig make(int length, int gap, std::uint64_t seed, SampleMode mode) {
  SamplerConfig c;
  c.length = length;
  c.min_gap = gap;
  c.seed = seed;
  c.mode = mode;
  return c;
}

std::vector<int> random_keyframes(std::mt19937_64& rng, int max_count, int max_index) {
  std::uniform_int_distribution<int> n(1, max_count), idx(0, max_index);
  std::set<int> s;
  const int want = n(rng);
  while (static_cast<int>(s.size()) < std::min(want, max_index + 1)) s.insert(idx(rng));
  return {s.begin(), s.end()};
}

// Largest subset size with consecutive gaps >= d, by brute force over bitmasks.
int brute_max_feasible(const std::vector<int>& keys, int d) {
  int best = 0;
  for (unsigned mask = 1; mask < (1u << keys.size()); ++mask) {
    int prev = -1, cnt = 0;
    bool ok = true;
    for (std::size_t i = 0; i < keys.size(); ++i) {
      if (!(mask >> i & 1u)) continue;
      if (prev >= 0 && keys[i] - prev < d) ok = false;
      prev = keys[i];
      ++cnt;
    }
    if (ok) best = std::max(best, cnt);
  }
  return best;
}

}  // namespace

TEST(Sample, EvenCyclesShortList) {
  const std::vector<int> k{3, 5, 9};
  EXPECT_EQ(sample(k, make(5, 2, 0, SampleMode::kEven)), (std::vector<int>{3, 5, 9, 3, 5}));
}

TEST(Sample, EvenSpacingOnLongList) {
  std::vector<int> k;
  for (int i = 0; i < 100; i += 2) k.push_back(i);
  const auto out = sample(k, make(10, 2, 0, SampleMode::kEven));
  EXPECT_EQ(out, (std::vector<int>{0, 10, 20, 30, 40, 50, 60, 70, 80, 90}));
}

TEST(Sample, EvenThinsBeforeSpacing) {
  const std::vector<int> k{0, 1, 2, 3, 4, 5};
  EXPECT_EQ(sample(k, make(3, 2, 0, SampleMode::kEven)), (std::vector<int>{0, 2, 4}));
}

TEST(Sample, EmptyThrowsNoKeyframes) {
  EXPECT_THROW(sample({}, make(5, 2, 0, SampleMode::kRandom)), NoKeyframesError);
  EXPECT_THROW(sample({}, make(5, 2, 0, SampleMode::kEven)), NoKeyframesError);
}

TEST(Sample, RejectsUnsortedAndBadConfig) {
  const std::vector<int> k{4, 2};
  EXPECT_THROW(sample(k, make(5, 2, 0, SampleMode::kRandom)), Error);
  const std::vector<int> ok{1};
  EXPECT_THROW(sample(ok, make(0, 2, 0, SampleMode::kRandom)), Error);
  EXPECT_THROW(sample(ok, make(3, -1, 0, SampleMode::kRandom)), Error);
}

TEST(SampleProperty, LengthMembershipGapAndCycle) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> len(1, 45), gap(0, 4);
  for (int trial = 0; trial < 400; ++trial) {
    const auto keys = random_keyframes(rng, 14, 60);
    const std::set<int> key_set(keys.begin(), keys.end());
    for (auto mode : {SampleMode::kRandom, SampleMode::kEven}) {
      const auto cfg = make(len(rng), gap(rng), rng(), mode);
      const auto out = sample(keys, cfg);
      ASSERT_EQ(out.size(), static_cast<std::size_t>(cfg.length));
      for (int v : out) EXPECT_TRUE(key_set.count(v));
      // The distinct prefix is strictly increasing with the gap respected,
      // and the rest repeats it cyclically.
      std::size_t m = 1;
      while (m < out.size() && out[m] > out[m - 1]) ++m;
      for (std::size_t i = 1; i < m; ++i) EXPECT_GE(out[i] - out[i - 1], cfg.min_gap);
      for (std::size_t i = m; i < out.size(); ++i) EXPECT_EQ(out[i], out[i % m]);
      if (mode == SampleMode::kRandom) {
        const int feasible = brute_max_feasible(keys, cfg.min_gap);
        EXPECT_EQ(static_cast<int>(m), std::min(cfg.length, feasible));
      }
    }
  }
}

TEST(SampleProperty, DeterministicForFixedSeed) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const auto keys = random_keyframes(rng, 30, 200);
    const auto cfg = make(10, 2, rng(), SampleMode::kRandom);
    EXPECT_EQ(sample(keys, cfg), sample(keys, cfg));
  }
}

TEST(SampleRandom, UniformOverFeasibleSubsets) {
  // Keyframes 0..7, gap 2, size 3: enumerate the feasible 3-subsets and
  // compare draw frequencies with a chi-square bound.
  const std::vector<int> keys{0, 1, 2, 3, 4, 5, 6, 7};
  std::map<std::vector<int>, int> expected;
  for (int a = 0; a < 8; ++a)
    for (int b = a + 2; b < 8; ++b)
      for (int c = b + 2; c < 8; ++c) expected[{a, b, c}] = 0;
  ASSERT_EQ(expected.size(), 20u);
  const int draws = 20000;
  for (int s = 0; s < draws; ++s) {
    const auto out = sample(keys, make(3, 2, mix_seed(99, s), SampleMode::kRandom));
    auto it = expected.find(out);
    ASSERT_NE(it, expected.end());
    ++it->second;
  }
  const double e = static_cast<double>(draws) / expected.size();
  double chi2 = 0;
  for (const auto& [subset, n] : expected) chi2 += (n - e) * (n - e) / e;
  // 19 degrees of freedom; 43.8 is the 0.999 quantile.
  EXPECT_LT(chi2, 43.8);
}

TEST(SampleRandom, DifferentSeedsDiffer) {
  std::vector<int> keys;
  for (int i = 0; i < 120; ++i) keys.push_back(i);
  const auto a = sample(keys, make(40, 2, tracklet_seed(0, "t0001"), SampleMode::kRandom));
  const auto b = sample(keys, make(40, 2, tracklet_seed(0, "t0002"), SampleMode::kRandom));
  const auto c = sample(keys, make(40, 2, tracklet_seed(1, "t0001"), SampleMode::kRandom));
  EXPECT_NE(a, b);
  EXPECT_NE(a, c);
}

TEST(Seeds, FnvAndMix) {
  EXPECT_EQ(id_hash(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(id_hash("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(tracklet_seed(5, "a"), 5ULL ^ 0xaf63dc4c8601ec8cULL);
  EXPECT_NE(mix_seed(1, 0), mix_seed(1, 1));
  EXPECT_NE(mix_seed(0, 1), mix_seed(1, 0));
  EXPECT_EQ(mix_seed(3, 4), mix_seed(3, 4));
}
