#pragma once

#include <cstddef>

// Hot-loop kernels with a scalar reference and an AVX2/FMA variant picked
// at runtime.  FSG_SIMD=scalar forces the reference path.
namespace fsg::simd {

enum class Isa { Scalar, Avx2 };

struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum_i w[i] * a[i] * b[i]
  double (*dot3)(const double* w, const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y = A x, A row-major rows x cols
  void (*gemv)(const double* A, std::size_t rows, std::size_t cols, const double* x, double* y);
};

const KernelTable& scalar_kernels();
// Falls back to the scalar table when the build has no AVX2 variant.
const KernelTable& avx2_kernels();
bool cpu_has_avx2();

Isa active_isa();
const KernelTable& active();
const char* isa_name(Isa isa);

inline double dot(const double* a, const double* b, std::size_t n) { return active().dot(a, b, n); }
inline double dot3(const double* w, const double* a, const double* b, std::size_t n) {
  return active().dot3(w, a, b, n);
}
inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
  active().axpy(alpha, x, y, n);
}
inline void gemv(const double* A, std::size_t rows, std::size_t cols, const double* x, double* y) {
  active().gemv(A, rows, cols, x, y);
}

}  // namespace fsg::simd
