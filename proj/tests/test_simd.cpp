#include <cmath>
#include <cstdlib>
#include <cstring>
#include <random>
#include <vector>

#include "doctest.h"
#include "fsg/simd.hpp"

using namespace fsg::simd;

namespace {

std::vector<double> random_vector(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_CASE("dispatch") {
  const Isa isa = active_isa();
  CHECK((isa == Isa::Scalar || isa == Isa::Avx2));
  if (!cpu_has_avx2()) CHECK(isa == Isa::Scalar);
  if (const char* env = std::getenv("FSG_SIMD"); env && std::strcmp(env, "scalar") == 0) CHECK(isa == Isa::Scalar);
  CHECK(std::string(isa_name(Isa::Scalar)) == "scalar");
}

TEST_CASE("AVX2 kernels agree with the scalar reference") {
  const KernelTable& s = scalar_kernels();
  const KernelTable& v = avx2_kernels();
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 15u, 16u, 17u, 100u, 1023u}) {
    const auto a = random_vector(n, 1 + n), b = random_vector(n, 2 + n), w = random_vector(n, 3 + n);
    const double tol = 1e-14 * (n + 1);
    CHECK(std::abs(s.dot(a.data(), b.data(), n) - v.dot(a.data(), b.data(), n)) <= tol);
    CHECK(std::abs(s.dot3(w.data(), a.data(), b.data(), n) - v.dot3(w.data(), a.data(), b.data(), n)) <= tol);
    auto y1 = b, y2 = b;
    s.axpy(0.7, a.data(), y1.data(), n);
    v.axpy(0.7, a.data(), y2.data(), n);
    for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(y1[k] - y2[k]) <= 1e-15);
  }
  for (auto [rows, cols] : {std::pair<std::size_t, std::size_t>{1, 1}, {5, 9}, {13, 64}, {7, 301}}) {
    const auto A = random_vector(rows * cols, 11), x = random_vector(cols, 12);
    std::vector<double> y1(rows), y2(rows);
    s.gemv(A.data(), rows, cols, x.data(), y1.data());
    v.gemv(A.data(), rows, cols, x.data(), y2.data());
    for (std::size_t r = 0; r < rows; ++r) CHECK(std::abs(y1[r] - y2[r]) <= 1e-14 * cols);
  }
}

TEST_CASE("scalar reference values") {
  const double a[3] = {1, 2, 3}, b[3] = {4, 5, 6}, w[3] = {1, 0.5, 2};
  CHECK(scalar_kernels().dot(a, b, 3) == 32.0);
  CHECK(scalar_kernels().dot3(w, a, b, 3) == 4.0 + 5.0 + 36.0);
}
