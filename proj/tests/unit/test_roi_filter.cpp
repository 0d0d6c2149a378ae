#include <gtest/gtest.h>

#include <random>

#include "../support/oracles.hpp"
#include "jnr/roi_filter.hpp"

using namespace jnr;

namespace {

BBox random_int_box(std::mt19937_64& rng, int limit) {
  std::uniform_int_distribution<int> c(0, limit);
  for (;;) {
    int x1 = c(rng), x2 = c(rng), y1 = c(rng), y2 = c(rng);
    if (x1 == x2 || y1 == y2) continue;
    if (x1 > x2) std::swap(x1, x2);
    if (y1 > y2) std::swap(y1, y2);
    return {double(x1), double(y1), double(x2), double(y2)};
  }
}

std::vector<Frame> frames_120x150(int n) {
  std::vector<Frame> f;
  for (int i = 0; i < n; ++i) f.push_back(Frame::filled(i, 120, 150, {0, 0, 0}));
  return f;
}

}  // namespace

TEST(IStar, Examples) {
  EXPECT_NEAR(i_star({0, 0, 10, 10}, {0, 0, 10, 10}, 1e-7), 1.0, 1e-8);
  EXPECT_EQ(i_star({0, 0, 10, 10}, {20, 20, 30, 30}, 1e-7), 0.0);
  EXPECT_NEAR(i_star({0, 0, 10, 10}, {5, 0, 15, 10}, 1e-7), 50.0 / (100.0 + 1e-7), 1e-15);
  EXPECT_NEAR(oracle::raster_i_star({0, 0, 10, 10}, {5, 0, 15, 10}, 1e-7), 0.5, 1e-8);
}

TEST(IStar, MatchesRasterOracleOnRandomIntegerBoxes) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 1000; ++i) {
    const BBox a = random_int_box(rng, 64), b = random_int_box(rng, 64);
    const double want = oracle::raster_i_star(a, b, 1e-7);
    const double got = i_star(a, b, 1e-7);
    EXPECT_LE(std::fabs(got - want), 0.02 * std::max(want, 1e-12)) << i;
  }
}

TEST(IStar, BoundedSymmetricAndContainment) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 64);
  for (int i = 0; i < 2000; ++i) {
    BBox a{u(rng), u(rng), 0, 0}, b{u(rng), u(rng), 0, 0};
    a.x2 = a.x1 + 0.5 + u(rng);
    a.y2 = a.y1 + 0.5 + u(rng);
    b.x2 = b.x1 + 0.5 + u(rng);
    b.y2 = b.y1 + 0.5 + u(rng);
    const double v = i_star(a, b, 1e-7);
    EXPECT_GE(v, 0.0);
    EXPECT_LT(v, 1.0);
    EXPECT_EQ(v, i_star(b, a, 1e-7));
    const BBox inner{a.x1 + 0.1, a.y1 + 0.1, a.x2 - 0.1, a.y2 - 0.1};
    const double amin = area(inner);
    EXPECT_GE(i_star(a, inner, 1e-7), amin / (amin + 1e-7) - 1e-12);
  }
}

TEST(RoiForFrame, Examples) {
  const RoiConfig cfg;
  EXPECT_EQ(roi_for_frame(120, 150, cfg), (BBox{30, 30, 90, 75}));
  EXPECT_EQ(roi_for_frame(100, 100, cfg), (BBox{25, 20, 75, 50}));
  EXPECT_EQ(roi_for_frame(1, 1, cfg), (BBox{0.25, 0.2, 0.75, 0.5}));
}

TEST(RoiConfig, RejectsBadFractions) {
  RoiConfig c;
  c.left = 0.8;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.eps = 0;
  EXPECT_THROW(c.validate(), Error);
}

TEST(FilterByRoi, ContainmentLegAndBoundary) {
  const auto frames = frames_120x150(1);
  const RoiConfig cfg;
  const std::vector<Detection> dets{
      {0, {50, 40, 70, 70}, 0.9},     // inside RoI
      {0, {40, 120, 55, 145}, 0.9},   // on a leg, below RoI
      {0, {78, 40, 98, 60}, 0.9},     // 60% inside
      {0, {80, 40, 100, 60}, 0.9},    // exactly half inside, pushed under 0.5 by eps
  };
  EXPECT_NEAR(oracle::raster_i_star(roi_for_frame(120, 150, cfg), dets[3].box, 0.0), 0.5, 1e-12);
  const auto kept = filter_by_roi(dets, frames, cfg);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0], dets[0]);
  EXPECT_EQ(kept[1], dets[2]);
}

TEST(FilterByRoi, SubsetOrderPreservedAndIdempotent) {
  const auto frames = frames_120x150(4);
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> fi(0, 3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Detection> dets;
    for (int k = 0; k < 20; ++k) {
      BBox b = random_int_box(rng, 120);
      b.y1 = std::min(b.y1 * 1.2, 149.0);
      b.y2 = std::max(b.y1 + 1, std::min(b.y2 * 1.2, 150.0));
      dets.push_back({fi(rng), b, 0.5});
    }
    const auto once = filter_by_roi(dets, frames, RoiConfig{});
    const auto twice = filter_by_roi(once, frames, RoiConfig{});
    EXPECT_EQ(once, twice);
    std::size_t j = 0;
    for (const auto& d : dets)
      if (j < once.size() && d == once[j]) ++j;
    EXPECT_EQ(j, once.size());
  }
}

TEST(FilterByRoi, MissingFrameThrows) {
  const auto frames = frames_120x150(1);
  const std::vector<Detection> dets{{3, {50, 40, 70, 70}, 0.9}};
  EXPECT_THROW(filter_by_roi(dets, frames, RoiConfig{}), Error);
}

TEST(IStar, MatchesRationalClosedFormOnQuarterGrid) {
  using oracle::Q;
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> c(0, 160);
  auto coord_pair = [&](Q& lo, Q& hi) {
    int a = c(rng), b = c(rng);
    while (a == b) b = c(rng);
    if (a > b) std::swap(a, b);
    lo = Q::make(a, 4);
    hi = Q::make(b, 4);
  };
  for (int i = 0; i < 1000; ++i) {
    oracle::QBox a, b;
    coord_pair(a.x1, a.x2);
    coord_pair(a.y1, a.y2);
    coord_pair(b.x1, b.x2);
    coord_pair(b.y1, b.y2);
    const double want = oracle::closed_form_i_star(a, b, 1e-7);
    EXPECT_NEAR(i_star(a.to_bbox(), b.to_bbox(), 1e-7), want, 1e-12) << i;
  }
}
