#pragma once

namespace opwire::kernels {

/// Dense double-precision kernels behind the matrix routines. Two variants
/// exist: a scalar reference and an AVX2 path selected at runtime. Both
/// traverse in the same i-k-j order with no FMA contraction, so their results
/// are bit-identical; the equivalence tests assert exact equality.
struct MatKernels {
  const char* name;
  // out[n x m] = a[n x k] * b[k x m]; out must not alias a or b.
  void (*matmul)(double* out, const double* a, const double* b, int n, int k, int m);
  // dst[i] -= f * src[i]; no-op when f == 0 so untouched rows keep their bits.
  void (*row_axpy)(double* dst, const double* src, double f, int len);
  // dst[i] *= f
  void (*row_scale)(double* dst, double f, int len);
};

const MatKernels& scalar_kernels();

/// AVX2 variant, or nullptr when the binary or CPU lacks support.
const MatKernels* avx2_kernels();

/// Kernel set used by the matrix routines: AVX2 when available unless the
/// OPWIRE_FORCE_SCALAR environment variable is set.
const MatKernels& active_kernels();

}  // namespace opwire::kernels
