#include <cstdlib>
#include <cstring>

#include "fsg/simd.hpp"

namespace fsg::simd {

bool cpu_has_avx2() {
#if defined(__GNUC__) && (defined(__x86_64__) || defined(__i386__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

Isa detect() {
  if (const char* env = std::getenv("FSG_SIMD"); env && std::strcmp(env, "scalar") == 0)
    return Isa::Scalar;
  return cpu_has_avx2() && &avx2_kernels() != &scalar_kernels() ? Isa::Avx2 : Isa::Scalar;
}

}  // namespace

Isa active_isa() {
  static const Isa isa = detect();
  return isa;
}

const KernelTable& active() {
  static const KernelTable& table = active_isa() == Isa::Avx2 ? avx2_kernels() : scalar_kernels();
  return table;
}

const char* isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

}  // namespace fsg::simd
