#include "jnr/simd/kernels.hpp"

namespace jnr::simd::scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace jnr::simd::scalar

namespace jnr::simd::scalar {

void conv3x3(const double* k, const double* in, std::size_t stride, double* z, std::size_t n) {
  const double* r0 = in;
  const double* r1 = in + stride;
  const double* r2 = in + 2 * stride;
  for (std::size_t i = 0; i < n; ++i) {
    double acc = z[i];
    acc += k[0] * r0[i];
    acc += k[1] * r0[i + 1];
    acc += k[2] * r0[i + 2];
    acc += k[3] * r1[i];
    acc += k[4] * r1[i + 1];
    acc += k[5] * r1[i + 2];
    acc += k[6] * r2[i];
    acc += k[7] * r2[i + 1];
    acc += k[8] * r2[i + 2];
    z[i] = acc;
  }
}

void conv3x3_grad(const double* dz, const double* in, std::size_t stride, std::size_t n, double* g) {
  for (int ky = 0; ky < 3; ++ky)
    for (int kx = 0; kx < 3; ++kx) g[3 * ky + kx] += dot(dz, in + ky * stride + kx, n);
}

}  // namespace jnr::simd::scalar
