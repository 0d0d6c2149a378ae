#include <arm_neon.h>

#include "jnr/simd/kernels.hpp"

namespace jnr::simd::neon {

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t p = vmulq_f64(va, vld1q_f64(x + i));
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), p));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void conv3x3(const double* k, const double* in, std::size_t stride, double* z, std::size_t n) {
  const double* r[3] = {in, in + stride, in + 2 * stride};
  float64x2_t kv[9];
  for (int t = 0; t < 9; ++t) kv[t] = vdupq_n_f64(k[t]);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t acc = vld1q_f64(z + i);
    for (int t = 0; t < 9; ++t) acc = vaddq_f64(acc, vmulq_f64(kv[t], vld1q_f64(r[t / 3] + i + t % 3)));
    vst1q_f64(z + i, acc);
  }
  if (i < n) scalar::conv3x3(k, in + i, stride, z + i, n - i);
}

void conv3x3_grad(const double* dz, const double* in, std::size_t stride, std::size_t n, double* g) {
  const double* r[3] = {in, in + stride, in + 2 * stride};
  float64x2_t acc[9];
  for (auto& a : acc) a = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t d = vld1q_f64(dz + i);
    for (int t = 0; t < 9; ++t) acc[t] = vfmaq_f64(acc[t], d, vld1q_f64(r[t / 3] + i + t % 3));
  }
  for (int t = 0; t < 9; ++t) g[t] += vaddvq_f64(acc[t]);
  if (i < n) scalar::conv3x3_grad(dz + i, in + i, stride, n - i, g);
}

}  // namespace jnr::simd::neon
