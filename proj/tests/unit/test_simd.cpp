#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <stdexcept>
#include <vector>

#include "../support/oracles.hpp"
#include "jnr/simd/kernels.hpp"
#include "jnr/stnet/network.hpp"

using namespace jnr;
namespace sd = jnr::simd;

namespace {

struct Variant {
  const char* name;
  double (*dot)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*conv)(const double*, const double*, std::size_t, double*, std::size_t);
  void (*conv_grad)(const double*, const double*, std::size_t, std::size_t, double*);
};

std::vector<Variant> variants() {
  std::vector<Variant> v;
#if defined(__x86_64__) || defined(_M_X64)
  if (sd::isa_available(sd::Isa::kAvx2)) v.push_back({"avx2", sd::avx2::dot, sd::avx2::axpy, sd::avx2::conv3x3, sd::avx2::conv3x3_grad});
#endif
#if defined(__aarch64__)
  if (sd::isa_available(sd::Isa::kNeon)) v.push_back({"neon", sd::neon::dot, sd::neon::axpy, sd::neon::conv3x3, sd::neon::conv3x3_grad});
#endif
  return v;
}

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST(Simd, ScalarAlwaysAvailable) {
  EXPECT_TRUE(sd::isa_available(sd::Isa::kScalar));
  EXPECT_FALSE(sd::isa_name(sd::active_isa()).empty());
}

TEST(Simd, ForceUnavailableIsaThrows) {
  const sd::Isa missing =
#if defined(__aarch64__)
      sd::Isa::kAvx2;
#else
      sd::Isa::kNeon;
#endif
  EXPECT_THROW(sd::force_isa(missing), std::invalid_argument);
}

TEST(Simd, DotWithinTolerance) {
  std::mt19937_64 rng(1);
  for (const auto& v : variants()) {
    for (std::size_t n = 0; n < 300; n += 1 + n / 7) {
      for (std::size_t off : {0, 1, 3}) {
        const auto a = random_vec(rng, n + off), b = random_vec(rng, n + off);
        const double want = sd::scalar::dot(a.data() + off, b.data() + off, n);
        double mag = 0;
        for (std::size_t i = 0; i < n; ++i) mag += std::fabs(a[off + i] * b[off + i]);
        EXPECT_NEAR(v.dot(a.data() + off, b.data() + off, n), want, 1e-14 * (mag + 1)) << v.name << " n=" << n;
      }
    }
  }
}

TEST(Simd, AxpyBitwise) {
  std::mt19937_64 rng(2);
  for (const auto& v : variants()) {
    for (std::size_t n = 0; n < 200; n += 1 + n / 5) {
      for (std::size_t off : {0, 1, 2}) {
        const auto x = random_vec(rng, n + off);
        auto y1 = random_vec(rng, n + off);
        auto y2 = y1;
        sd::scalar::axpy(0.37, x.data() + off, y1.data() + off, n);
        v.axpy(0.37, x.data() + off, y2.data() + off, n);
        EXPECT_TRUE(bitwise_equal(y1, y2)) << v.name << " n=" << n;
      }
    }
  }
}

TEST(Simd, Conv3x3Bitwise) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> dim(3, 40);
  for (const auto& v : variants()) {
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t stride = dim(rng), rows = dim(rng);
      const std::size_t n = (rows - 2) * stride - 2;
      const auto k = random_vec(rng, 9), in = random_vec(rng, rows * stride);
      auto z1 = random_vec(rng, n);
      auto z2 = z1;
      sd::scalar::conv3x3(k.data(), in.data(), stride, z1.data(), n);
      v.conv(k.data(), in.data(), stride, z2.data(), n);
      EXPECT_TRUE(bitwise_equal(z1, z2)) << v.name << " stride=" << stride;
    }
  }
}

TEST(Simd, Conv3x3GradWithinTolerance) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<std::size_t> dim(3, 40);
  for (const auto& v : variants()) {
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t stride = dim(rng), rows = dim(rng);
      const std::size_t n = (rows - 2) * stride - 2;
      const auto dz = random_vec(rng, n), in = random_vec(rng, rows * stride);
      std::vector<double> g1(9, 0.5), g2(9, 0.5);
      sd::scalar::conv3x3_grad(dz.data(), in.data(), stride, n, g1.data());
      v.conv_grad(dz.data(), in.data(), stride, n, g2.data());
      for (int t = 0; t < 9; ++t) EXPECT_NEAR(g1[t], g2[t], 1e-12 * static_cast<double>(n)) << v.name;
    }
  }
}

TEST(Simd, Conv3x3MatchesDirectLoop) {
  std::mt19937_64 rng(5);
  const std::size_t stride = 11, rows = 9, n = (rows - 2) * stride - 2;
  const auto k = random_vec(rng, 9), in = random_vec(rng, rows * stride);
  std::vector<double> z(n, 0.0), want(n, 0.0);
  sd::conv3x3(k.data(), in.data(), stride, z.data(), n);
  for (std::size_t i = 0; i < n; ++i)
    for (int ky = 0; ky < 3; ++ky)
      for (int kx = 0; kx < 3; ++kx) want[i] += k[3 * ky + kx] * in[i + ky * stride + kx];
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(z[i], want[i], 1e-12);
}

TEST(Simd, WholeNetworkAgreesAcrossIsas) {
  auto m = oracle::make_micro_model(12);
  const sd::Isa native = sd::active_isa();
  sd::force_isa(sd::Isa::kScalar);
  stnet::ModelParams g_ref = m.params;
  for (auto& [name, t] : g_ref.tensors()) std::fill(t->data.begin(), t->data.end(), 0.0);
  stnet::ModelParams g_nat = g_ref;
  const double loss_ref = stnet::example_backward(m.example, m.params, m.cfg, g_ref);
  sd::force_isa(native);
  const double loss_nat = stnet::example_backward(m.example, m.params, m.cfg, g_nat);
  EXPECT_NEAR(loss_ref, loss_nat, 1e-12);
  const auto a = g_ref.tensors(), b = g_nat.tensors();
  for (std::size_t k = 0; k < a.size(); ++k)
    for (std::size_t i = 0; i < a[k].second->data.size(); ++i)
      EXPECT_NEAR(a[k].second->data[i], b[k].second->data[i], 1e-10 * (1 + std::fabs(a[k].second->data[i])))
          << a[k].first;
}
