#include "opwire/kernels.hpp"

namespace opwire::kernels {
namespace {

void matmul_scalar(double* out, const double* a, const double* b, int n, int k, int m) {
  for (int i = 0; i < n * m; ++i) out[i] = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int l = 0; l < k; ++l) {
      const double a_il = a[i * k + l];
      const double* brow = b + l * m;
      double* orow = out + i * m;
      for (int j = 0; j < m; ++j) {
        orow[j] += a_il * brow[j];
      }
    }
  }
}

void row_axpy_scalar(double* dst, const double* src, double f, int len) {
  if (f == 0.0) return;
  for (int j = 0; j < len; ++j) {
    dst[j] -= f * src[j];
  }
}

void row_scale_scalar(double* dst, double f, int len) {
  for (int j = 0; j < len; ++j) {
    dst[j] *= f;
  }
}

}  // namespace

const MatKernels& scalar_kernels() {
  static const MatKernels k{"scalar", matmul_scalar, row_axpy_scalar, row_scale_scalar};
  return k;
}

}  // namespace opwire::kernels
