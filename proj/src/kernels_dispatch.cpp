#include "aide/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace aide::kernels {

#if defined(AIDE_HAVE_AVX2_TU)
const Ops& avx2_ops_table();  // defined in kernels_avx2.cpp
#endif

bool avx2_supported() {
#if defined(AIDE_HAVE_AVX2_TU)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Ops& avx2_ops() {
#if defined(AIDE_HAVE_AVX2_TU)
  return avx2_ops_table();
#else
  return scalar_ops();
#endif
}

const Ops& active() {
  static const Ops* chosen = [] {
    if (const char* env = std::getenv("AIDE_KERNELS")) {
      if (std::strcmp(env, "scalar") == 0) return &scalar_ops();
      if (std::strcmp(env, "avx2") == 0 && avx2_supported())
        return &avx2_ops();
    }
    return avx2_supported() ? &avx2_ops() : &scalar_ops();
  }();
  return *chosen;
}

}  // namespace aide::kernels
