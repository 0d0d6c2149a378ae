#include <atomic>
#include <stdexcept>
#include <string>

#include "jnr/simd/kernels.hpp"

namespace jnr::simd {
namespace {

struct KernelTable {
  Isa isa;
  double (*dot)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*conv3x3)(const double*, const double*, std::size_t, double*, std::size_t);
  void (*conv3x3_grad)(const double*, const double*, std::size_t, std::size_t, double*);
};

constexpr KernelTable kScalarTable{Isa::kScalar, &scalar::dot, &scalar::axpy, &scalar::conv3x3,
                                 &scalar::conv3x3_grad};
#if defined(JNR_HAVE_AVX2)
constexpr KernelTable kAvx2Table{Isa::kAvx2, &avx2::dot, &avx2::axpy, &avx2::conv3x3,
                                 &avx2::conv3x3_grad};
#endif
#if defined(JNR_HAVE_NEON)
constexpr KernelTable kNeonTable{Isa::kNeon, &neon::dot, &neon::axpy, &neon::conv3x3,
                                 &neon::conv3x3_grad};
#endif

const KernelTable* table_for(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return &kScalarTable;
    case Isa::kAvx2:
#if defined(JNR_HAVE_AVX2)
      return &kAvx2Table;
#else
      return nullptr;
#endif
    case Isa::kNeon:
#if defined(JNR_HAVE_NEON)
      return &kNeonTable;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

const KernelTable* detect() {
  if (isa_available(Isa::kAvx2)) return table_for(Isa::kAvx2);
  if (isa_available(Isa::kNeon)) return table_for(Isa::kNeon);
  return &kScalarTable;
}

std::atomic<const KernelTable*>& active_table() {
  static std::atomic<const KernelTable*> table{detect()};
  return table;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
    case Isa::kNeon: return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(JNR_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::kNeon:
#if defined(JNR_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() { return active_table().load(std::memory_order_relaxed)->isa; }

void force_isa(Isa isa) {
  if (!isa_available(isa)) {
    throw std::invalid_argument("SIMD variant '" + std::string(isa_name(isa)) +
                                "' is not available on this CPU");
  }
  active_table().store(table_for(isa), std::memory_order_relaxed);
}

double dot(const double* a, const double* b, std::size_t n) {
  return active_table().load(std::memory_order_relaxed)->dot(a, b, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  active_table().load(std::memory_order_relaxed)->axpy(alpha, x, y, n);
}

void conv3x3(const double* k, const double* in, std::size_t stride, double* z, std::size_t n) {
  active_table().load(std::memory_order_relaxed)->conv3x3(k, in, stride, z, n);
}

void conv3x3_grad(const double* dz, const double* in, std::size_t stride, std::size_t n, double* g) {
  active_table().load(std::memory_order_relaxed)->conv3x3_grad(dz, in, stride, n, g);
}

void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
  const KernelTable* t = active_table().load(std::memory_order_relaxed);
  for (std::size_t r = 0; r < rows; ++r) y[r] += t->dot(a + r * cols, x, cols);
}

void gemv_t(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
  const KernelTable* t = active_table().load(std::memory_order_relaxed);
  for (std::size_t r = 0; r < rows; ++r) {
    if (x[r] != 0.0) t->axpy(x[r], a + r * cols, y, cols);
  }
}

void ger(double* a, std::size_t rows, std::size_t cols, const double* x, const double* y) {
  const KernelTable* t = active_table().load(std::memory_order_relaxed);
  for (std::size_t r = 0; r < rows; ++r) {
    if (x[r] != 0.0) t->axpy(x[r], y, a + r * cols, cols);
  }
}

}  // namespace jnr::simd
