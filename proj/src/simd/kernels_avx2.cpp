// Compiled with -mavx2 -mfma; only reached after a CPUID check in dispatch.cpp.
#include <immintrin.h>

#include "jnr/simd/kernels.hpp"

namespace jnr::simd::avx2 {

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  if (i + 4 <= n) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    i += 4;
  }
  acc0 = _mm256_add_pd(acc0, acc1);
  const __m128d lo = _mm256_castpd256_pd128(acc0);
  const __m128d hi = _mm256_extractf128_pd(acc0, 1);
  __m128d s = _mm_add_pd(lo, hi);
  s = _mm_add_sd(s, _mm_unpackhi_pd(s, s));
  double acc = _mm_cvtsd_f64(s);
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    // mul + add (not fmadd) keeps results bitwise equal to the scalar path
    const __m256d p0 = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    const __m256d p1 = _mm256_mul_pd(va, _mm256_loadu_pd(x + i + 4));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), p0));
    _mm256_storeu_pd(y + i + 4, _mm256_add_pd(_mm256_loadu_pd(y + i + 4), p1));
  }
  for (; i + 4 <= n; i += 4) {
    const __m256d p = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), p));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void conv3x3(const double* k, const double* in, std::size_t stride, double* z, std::size_t n) {
  const double* r0 = in;
  const double* r1 = in + stride;
  const double* r2 = in + 2 * stride;
  __m256d kv[9];
  for (int t = 0; t < 9; ++t) kv[t] = _mm256_set1_pd(k[t]);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d acc = _mm256_loadu_pd(z + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(kv[0], _mm256_loadu_pd(r0 + i)));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(kv[1], _mm256_loadu_pd(r0 + i + 1)));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(kv[2], _mm256_loadu_pd(r0 + i + 2)));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(kv[3], _mm256_loadu_pd(r1 + i)));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(kv[4], _mm256_loadu_pd(r1 + i + 1)));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(kv[5], _mm256_loadu_pd(r1 + i + 2)));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(kv[6], _mm256_loadu_pd(r2 + i)));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(kv[7], _mm256_loadu_pd(r2 + i + 1)));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(kv[8], _mm256_loadu_pd(r2 + i + 2)));
    _mm256_storeu_pd(z + i, acc);
  }
  if (i < n) scalar::conv3x3(k, in + i, stride, z + i, n - i);
}

void conv3x3_grad(const double* dz, const double* in, std::size_t stride, std::size_t n, double* g) {
  const double* r0 = in;
  const double* r1 = in + stride;
  const double* r2 = in + 2 * stride;
  __m256d acc[9];
  for (auto& a : acc) a = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_loadu_pd(dz + i);
    acc[0] = _mm256_fmadd_pd(d, _mm256_loadu_pd(r0 + i), acc[0]);
    acc[1] = _mm256_fmadd_pd(d, _mm256_loadu_pd(r0 + i + 1), acc[1]);
    acc[2] = _mm256_fmadd_pd(d, _mm256_loadu_pd(r0 + i + 2), acc[2]);
    acc[3] = _mm256_fmadd_pd(d, _mm256_loadu_pd(r1 + i), acc[3]);
    acc[4] = _mm256_fmadd_pd(d, _mm256_loadu_pd(r1 + i + 1), acc[4]);
    acc[5] = _mm256_fmadd_pd(d, _mm256_loadu_pd(r1 + i + 2), acc[5]);
    acc[6] = _mm256_fmadd_pd(d, _mm256_loadu_pd(r2 + i), acc[6]);
    acc[7] = _mm256_fmadd_pd(d, _mm256_loadu_pd(r2 + i + 1), acc[7]);
    acc[8] = _mm256_fmadd_pd(d, _mm256_loadu_pd(r2 + i + 2), acc[8]);
  }
  for (int t = 0; t < 9; ++t) {
    const __m128d lo = _mm256_castpd256_pd128(acc[t]);
    const __m128d hi = _mm256_extractf128_pd(acc[t], 1);
    __m128d s = _mm_add_pd(lo, hi);
    s = _mm_add_sd(s, _mm_unpackhi_pd(s, s));
    g[t] += _mm_cvtsd_f64(s);
  }
  if (i < n) scalar::conv3x3_grad(dz + i, in + i, stride, n - i, g);
}

}  // namespace jnr::simd::avx2
