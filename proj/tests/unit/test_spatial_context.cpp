#include <gtest/gtest.h>

#include <random>

#include "../support/oracles.hpp"
#include "jnr/spatial_context.hpp"
#include "jnr/synthgen.hpp"

using namespace jnr;

namespace {

void paint(std::vector<std::uint8_t>& px, int w, int x0, int y0, int x1, int y1, Rgb c) {
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) {
      const std::size_t o = (static_cast<std::size_t>(y) * w + x) * 3;
      px[o] = c.r;
      px[o + 1] = c.g;
      px[o + 2] = c.b;
    }
}

HueHistogram one_hot(int bins, int k) {
  HueHistogram h;
  h.bins.assign(bins, 0.0);
  h.bins[k] = 1.0;
  h.pixel_count = 1;
  return h;
}

}  // namespace

TEST(Hue, Examples) {
  EXPECT_EQ(rgb_to_hue(255, 0, 0), 0.0);
  EXPECT_EQ(rgb_to_hue(0, 255, 0), 120.0);
  EXPECT_EQ(rgb_to_hue(0, 0, 255), 240.0);
  EXPECT_EQ(rgb_to_hue(255, 255, 0), 60.0);
  EXPECT_EQ(rgb_to_hue(255, 0, 255), 300.0);
  EXPECT_EQ(rgb_to_hue(128, 128, 128), 0.0);
  EXPECT_EQ(rgb_to_hue(0, 0, 0), 0.0);
}

TEST(Hue, AlwaysInRange) {
  for (int r = 0; r < 256; r += 15)
    for (int g = 0; g < 256; g += 15)
      for (int b = 0; b < 256; b += 15) {
        const double h = rgb_to_hue(r, g, b);
        ASSERT_GE(h, 0.0);
        ASSERT_LT(h, 360.0);
      }
}

TEST(HueHistogram, HalfRedHalfGreen) {
  std::vector<std::uint8_t> px(20 * 10 * 3);
  paint(px, 20, 0, 0, 10, 10, {255, 0, 0});
  paint(px, 20, 10, 0, 20, 10, {0, 255, 0});
  const Frame f(0, 20, 10, px);
  const auto h = hue_histogram(f, {0, 0, 20, 10}, 30);
  ASSERT_EQ(h.bins.size(), 30u);
  EXPECT_EQ(h.pixel_count, 200);
  EXPECT_DOUBLE_EQ(h.bins[0], 0.5);
  EXPECT_DOUBLE_EQ(h.bins[10], 0.5);
  double sum = 0;
  for (double v : h.bins) sum += v;
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(HueHistogram, EmptyBoxIsUniform) {
  const Frame f = Frame::filled(0, 10, 10, {0, 0, 255});
  const auto h = hue_histogram(f, {3.2, 3.2, 3.4, 3.4}, 30);
  EXPECT_TRUE(h.degenerate());
  for (double v : h.bins) EXPECT_DOUBLE_EQ(v, 1.0 / 30);
}

TEST(HueHistogram, InvariantUnderIntegerUpscale) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> u(0, 255);
  const int w = 12, h = 9;
  std::vector<std::uint8_t> px(w * h * 3);
  for (auto& v : px) v = static_cast<std::uint8_t>(u(rng));
  const Frame small(0, w, h, px);
  for (int s : {2, 3}) {
    std::vector<std::uint8_t> big(static_cast<std::size_t>(w * s) * h * s * 3);
    for (int y = 0; y < h * s; ++y)
      for (int x = 0; x < w * s; ++x)
        for (int c = 0; c < 3; ++c)
          big[(static_cast<std::size_t>(y) * w * s + x) * 3 + c] = px[(static_cast<std::size_t>(y / s) * w + x / s) * 3 + c];
    const Frame large(0, w * s, h * s, big);
    const auto a = hue_histogram(small, {2, 1, 10, 8}, 30);
    const auto b = hue_histogram(large, {2.0 * s, 1.0 * s, 10.0 * s, 8.0 * s}, 30);
    for (int i = 0; i < 30; ++i) EXPECT_NEAR(a.bins[i], b.bins[i], 1e-12);
  }
}

TEST(Correlation, OneHotPairs) {
  EXPECT_NEAR(hist_correlation(one_hot(30, 4), one_hot(30, 17)), -1.0 / 29.0, 1e-12);
  EXPECT_NEAR(hist_correlation(one_hot(30, 4), one_hot(30, 4)), 1.0, 1e-12);
}

TEST(Correlation, DegenerateAndMismatch) {
  HueHistogram u;
  u.bins.assign(30, 1.0 / 30);
  EXPECT_EQ(hist_correlation(u, u), 1.0);
  EXPECT_EQ(hist_correlation(u, one_hot(30, 2)), 0.0);
  EXPECT_THROW(hist_correlation(u, one_hot(10, 2)), Error);
}

TEST(Correlation, MatchesPearsonOracleAndIsSymmetric) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 500; ++i) {
    HueHistogram a, b;
    a.bins.resize(30);
    b.bins.resize(30);
    for (int k = 0; k < 30; ++k) a.bins[k] = u(rng), b.bins[k] = u(rng);
    const double c = hist_correlation(a, b);
    EXPECT_NEAR(c, oracle::pearson(a.bins, b.bins), 1e-12);
    EXPECT_EQ(c, hist_correlation(b, a));
    EXPECT_GE(c, -1.0);
    EXPECT_LE(c, 1.0);
  }
}

TEST(Lhc, MergesAdjacentSameColourDigits) {
  const int w = 60, h = 40;
  std::vector<std::uint8_t> px(w * h * 3, 0);
  paint(px, w, 0, 0, w, h, {30, 60, 200});
  paint(px, w, 12, 10, 20, 26, {255, 255, 255});
  paint(px, w, 24, 10, 32, 26, {255, 255, 255});
  const Frame f(0, w, h, px);
  const std::vector<Detection> dets{{0, {22, 8, 34, 28}, 0.6}, {0, {10, 8, 22, 28}, 0.9}};
  const auto merged = lhc_merge(dets, f, SpatialContextConfig{});
  ASSERT_EQ(merged.size(), 1u);
  EXPECT_EQ(merged[0].box, (BBox{10, 8, 34, 28}));
  EXPECT_EQ(merged[0].confidence, 0.9);
}

TEST(Lhc, KeepsDifferentlyColouredNeighboursApart) {
  const int w = 60, h = 40;
  std::vector<std::uint8_t> px(w * h * 3, 0);
  paint(px, w, 0, 0, 22, h, {30, 60, 200});
  paint(px, w, 22, 0, w, h, {200, 30, 30});
  const Frame f(0, w, h, px);
  const std::vector<Detection> dets{{0, {10, 8, 22, 28}, 0.9}, {0, {22, 8, 34, 28}, 0.6}};
  const auto out = lhc_merge(dets, f, SpatialContextConfig{});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].box, dets[0].box);
  EXPECT_EQ(out[1].box, dets[1].box);
}

TEST(Lhc, FarApartBoxesStaySeparate) {
  const Frame f = Frame::filled(0, 100, 40, {30, 60, 200});
  const std::vector<Detection> dets{{0, {5, 8, 15, 28}, 0.9}, {0, {80, 8, 90, 28}, 0.6}};
  EXPECT_EQ(lhc_merge(dets, f, SpatialContextConfig{}).size(), 2u);
}

TEST(Lhc, RejectsMixedFrames) {
  const Frame f = Frame::filled(0, 100, 40, {30, 60, 200});
  const std::vector<Detection> dets{{0, {5, 8, 15, 28}, 0.9}, {1, {16, 8, 26, 28}, 0.6}};
  EXPECT_THROW(lhc_merge(dets, f, SpatialContextConfig{}), Error);
}

TEST(Ghc, FiveBlueBeatTwoRed) {
  std::vector<Frame> frames;
  std::vector<Detection> dets;
  for (int i = 0; i < 7; ++i) {
    const Rgb bg = i < 2 ? Rgb{220, 20, 20} : Rgb{20, 40, 220};
    std::vector<std::uint8_t> px(40 * 40 * 3);
    paint(px, 40, 0, 0, 40, 40, bg);
    paint(px, 40, 15, 10, 22, 30, {255, 255, 255});
    frames.emplace_back(i, 40, 40, px);
    dets.push_back({i, {10, 5, 30, 35}, 0.8});
  }
  const auto r = ghc_select(dets, frames, SpatialContextConfig{});
  EXPECT_EQ(r.keyframe_indices, (std::vector<int>{2, 3, 4, 5, 6}));
  EXPECT_EQ(r.kept_detections.size(), 5u);
}

TEST(Ghc, EmptyAndSingleton) {
  EXPECT_TRUE(ghc_cluster({}, {}, 0.7).empty());
  const std::vector<HueHistogram> one{one_hot(30, 3)};
  const std::vector<int> f{9};
  EXPECT_EQ(ghc_cluster(one, f, 0.7), (std::vector<std::size_t>{0}));
}

TEST(Ghc, TieBreaksOnFrameIndex) {
  // Two equally sized, equally cohesive clusters; the one seen first wins.
  const std::vector<HueHistogram> h{one_hot(30, 5), one_hot(30, 20), one_hot(30, 5), one_hot(30, 20)};
  const std::vector<int> frames{7, 3, 8, 4};
  EXPECT_EQ(ghc_cluster(h, frames, 0.7), (std::vector<std::size_t>{1, 3}));
}

TEST(Ghc, AgreesWithExhaustiveOracle) {
  std::mt19937_64 rng(404);
  std::uniform_int_distribution<int> count(1, 8), proto(0, 2), frame(0, 30);
  std::uniform_real_distribution<double> noise(0.0, 0.25);
  std::uniform_real_distribution<double> tau(0.3, 0.9);
  std::vector<std::vector<double>> protos(3, std::vector<double>(30));
  for (auto& p : protos)
    for (auto& v : p) v = std::uniform_real_distribution<double>(0, 1)(rng);
  for (int inst = 0; inst < 200; ++inst) {
    const int n = count(rng);
    std::vector<HueHistogram> hists(n);
    std::vector<std::vector<double>> raw(n);
    std::vector<int> frames(n);
    for (int i = 0; i < n; ++i) {
      const auto& p = protos[proto(rng)];
      hists[i].bins.resize(30);
      for (int k = 0; k < 30; ++k) hists[i].bins[k] = p[k] + noise(rng);
      hists[i].pixel_count = 1;
      raw[i] = hists[i].bins;
      frames[i] = frame(rng);
    }
    const double t = tau(rng);
    EXPECT_EQ(ghc_cluster(hists, frames, t), oracle::ghc_exhaustive(raw, frames, t)) << "instance " << inst;
  }
}

TEST(Kfid, BlankFramesYieldNoKeyframes) {
  Tracklet t;
  t.id = "blank";
  for (int i = 0; i < 10; ++i) t.frames.push_back(Frame::filled(i, 120, 150, {20, 40, 200}));
  const auto r = kfid(t, DetectorConfig{}, RoiConfig{}, SpatialContextConfig{});
  EXPECT_TRUE(r.keyframe_indices.empty());
  EXPECT_TRUE(r.kept_detections.empty());
}

TEST(Kfid, FullyVisibleSynthTrackletKeepsMostFrames) {
  SynthConfig cfg;
  cfg.tracklets = 1;
  cfg.visibility = 1.0;
  cfg.occluder_prob = 0.0;
  cfg.distractor_prob = 0.0;
  cfg.frames_min = cfg.frames_max = 30;
  const auto plans = plan_tracklets(cfg);
  const auto st = render_tracklet(cfg, plans[0]);
  const auto r = kfid(st.tracklet, DetectorConfig{}, RoiConfig{}, SpatialContextConfig{});
  EXPECT_GE(r.keyframe_indices.size(), 27u);
  for (std::size_t i = 1; i < r.keyframe_indices.size(); ++i)
    EXPECT_LT(r.keyframe_indices[i - 1], r.keyframe_indices[i]);
}

TEST(Config, Validation) {
  SpatialContextConfig c;
  c.bins = 1;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.ghc_tau = 1.5;
  EXPECT_THROW(c.validate(), Error);
}
