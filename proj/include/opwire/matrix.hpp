#pragma once

#include <initializer_list>
#include <vector>

#include "opwire/errors.hpp"

namespace opwire {

/// Dense row-major matrix of doubles. Zero rows or columns are legal (a
/// static gain has a 0x0 state matrix).
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;  // row-major, rows*cols entries

  Matrix() = default;
  Matrix(int rows, int cols);
  Matrix(int rows, int cols, std::vector<double> entries);
  Matrix(std::initializer_list<std::initializer_list<double>> rows_init);

  static Matrix identity(int n);
  static Matrix zeros(int rows, int cols);

  double& at(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  double at(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

  bool all_finite() const;

  bool operator==(const Matrix&) const = default;
};

Matrix operator*(const Matrix& x, const Matrix& y);
Matrix operator+(const Matrix& x, const Matrix& y);
Matrix operator-(const Matrix& x, const Matrix& y);

/// Places `block` into `dst` with its top-left corner at (i, j).
void set_block(Matrix& dst, int i, int j, const Matrix& block);

/// Inverse by Gauss-Jordan elimination with partial pivoting. A pivot of
/// magnitude below `eps` reports failure instead of dividing.
struct InvertResult {
  bool ok = false;
  Matrix inverse;
  double failed_pivot = 0.0;  // magnitude of the offending pivot when !ok
};

InvertResult invert(const Matrix& m, double eps);

bool approx_equal(const Matrix& x, const Matrix& y, double tol);

}  // namespace opwire
