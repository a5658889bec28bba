// Compiled with -mavx2 (see CMakeLists); callers must check cpu support via
// avx2_kernels() before use. Vectorization runs along the j (column) axis so
// each output element accumulates in the same order as the scalar kernel, and
// mul/add stay separate instructions: results are bit-identical to scalar.

#include "opwire/kernels.hpp"

#if defined(__AVX2__)
#include <immintrin.h>

namespace opwire::kernels {
namespace {

void matmul_avx2(double* out, const double* a, const double* b, int n, int k, int m) {
  for (int i = 0; i < n * m; ++i) out[i] = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int l = 0; l < k; ++l) {
      const double a_il = a[i * k + l];
      const __m256d va = _mm256_set1_pd(a_il);
      const double* brow = b + l * m;
      double* orow = out + i * m;
      int j = 0;
      for (; j + 4 <= m; j += 4) {
        __m256d vb = _mm256_loadu_pd(brow + j);
        __m256d vo = _mm256_loadu_pd(orow + j);
        vo = _mm256_add_pd(vo, _mm256_mul_pd(va, vb));
        _mm256_storeu_pd(orow + j, vo);
      }
      for (; j < m; ++j) {
        orow[j] += a_il * brow[j];
      }
    }
  }
}

void row_axpy_avx2(double* dst, const double* src, double f, int len) {
  if (f == 0.0) return;
  const __m256d vf = _mm256_set1_pd(f);
  int j = 0;
  for (; j + 4 <= len; j += 4) {
    __m256d vs = _mm256_loadu_pd(src + j);
    __m256d vd = _mm256_loadu_pd(dst + j);
    vd = _mm256_sub_pd(vd, _mm256_mul_pd(vf, vs));
    _mm256_storeu_pd(dst + j, vd);
  }
  for (; j < len; ++j) {
    dst[j] -= f * src[j];
  }
}

void row_scale_avx2(double* dst, double f, int len) {
  const __m256d vf = _mm256_set1_pd(f);
  int j = 0;
  for (; j + 4 <= len; j += 4) {
    __m256d vd = _mm256_loadu_pd(dst + j);
    _mm256_storeu_pd(dst + j, _mm256_mul_pd(vd, vf));
  }
  for (; j < len; ++j) {
    dst[j] *= f;
  }
}

}  // namespace

const MatKernels* avx2_kernels_impl() {
  static const MatKernels k{"avx2", matmul_avx2, row_axpy_avx2, row_scale_avx2};
  return &k;
}

}  // namespace opwire::kernels
#endif  // __AVX2__
