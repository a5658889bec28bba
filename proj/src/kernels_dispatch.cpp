#include <cstdlib>

#include "opwire/kernels.hpp"

namespace opwire::kernels {

#if defined(OPWIRE_HAVE_AVX2)
const MatKernels* avx2_kernels_impl();
#endif

const MatKernels* avx2_kernels() {
#if defined(OPWIRE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const MatKernels* k =
      __builtin_cpu_supports("avx2") ? avx2_kernels_impl() : nullptr;
  return k;
#else
  return nullptr;
#endif
}

const MatKernels& active_kernels() {
  static const MatKernels* chosen = [] {
    if (std::getenv("OPWIRE_FORCE_SCALAR") != nullptr) return &scalar_kernels();
    if (const MatKernels* avx2 = avx2_kernels()) return avx2;
    return &scalar_kernels();
  }();
  return *chosen;
}

}  // namespace opwire::kernels
