#pragma once

// Dense double-precision kernels behind every arithmetic inner loop of the
// network (convolution taps, projections, recurrent gates).
//
// Each kernel has a scalar reference implementation and ISA-specific variants.
// The active variant is chosen once from CPUID at first use and can be pinned
// with force_isa() (tests use this to compare variants).
//
// Contract shared by all variants:
//  - axpy is elementwise mul-then-add without fused rounding, so every variant
//    is bitwise identical to the scalar reference.
//  - dot may reassociate the sum; variants agree with the reference to a few
//    ulps of sum(|a_i * b_i|), and each variant is deterministic for fixed n.
//  - conv3x3 adds the nine taps in tap order with separate mul and add, so it
//    is bitwise identical across variants; conv3x3_grad reassociates like dot.

#include <cstddef>
#include <span>
#include <string_view>

namespace jnr::simd {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view isa_name(Isa isa);
bool isa_available(Isa isa);
Isa active_isa();
// Throws std::invalid_argument if the ISA is not available on this CPU.
void force_isa(Isa isa);

double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return dot(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  axpy(alpha, x.data(), y.data(), x.size() < y.size() ? x.size() : y.size());
}

// 3x3 taps over a plane with row stride `stride`; tap t = 3*ky + kx sits at
// offset ky*stride + kx.
//   conv3x3:      z[i] += sum_t k[t] * in[i + off_t]         for i < n
//   conv3x3_grad: g[t] += sum_i dz[i] * in[i + off_t]        for t < 9
void conv3x3(const double* k, const double* in, std::size_t stride, double* z, std::size_t n);
void conv3x3_grad(const double* dz, const double* in, std::size_t stride, std::size_t n, double* g);

// y += A x for a row-major rows x cols matrix.
void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
// y += A^T x for a row-major rows x cols matrix (x has `rows` entries).
void gemv_t(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
// A += x y^T (rank-1 update), A row-major rows x cols.
void ger(double* a, std::size_t rows, std::size_t cols, const double* x, const double* y);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void conv3x3(const double* k, const double* in, std::size_t stride, double* z, std::size_t n);
void conv3x3_grad(const double* dz, const double* in, std::size_t stride, std::size_t n, double* g);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void conv3x3(const double* k, const double* in, std::size_t stride, double* z, std::size_t n);
void conv3x3_grad(const double* dz, const double* in, std::size_t stride, std::size_t n, double* g);
}  // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void conv3x3(const double* k, const double* in, std::size_t stride, double* z, std::size_t n);
void conv3x3_grad(const double* dz, const double* in, std::size_t stride, std::size_t n, double* g);
}  // namespace neon
#endif

}  // namespace jnr::simd
