#include "opwire/matrix.hpp"

#include <cmath>
#include <cstdlib>
#include <utility>

#include "opwire/kernels.hpp"

namespace opwire {

Matrix::Matrix(int rows_, int cols_)
    : rows(rows_), cols(cols_), a(static_cast<size_t>(rows_) * cols_, 0.0) {
  if (rows_ < 0 || cols_ < 0) {
    throw Error(ErrorCode::DimensionMismatch, "negative matrix dimension");
  }
}

Matrix::Matrix(int rows_, int cols_, std::vector<double> entries)
    : rows(rows_), cols(cols_), a(std::move(entries)) {
  if (rows_ < 0 || cols_ < 0 ||
      a.size() != static_cast<size_t>(rows_) * static_cast<size_t>(cols_)) {
    throw Error(ErrorCode::DimensionMismatch, "entry count does not match dims");
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows_init) {
  rows = static_cast<int>(rows_init.size());
  cols = rows ? static_cast<int>(rows_init.begin()->size()) : 0;
  a.reserve(static_cast<size_t>(rows) * cols);
  for (const auto& r : rows_init) {
    if (static_cast<int>(r.size()) != cols) {
      throw Error(ErrorCode::DimensionMismatch, "ragged initializer rows");
    }
    a.insert(a.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

Matrix Matrix::zeros(int rows, int cols) { return Matrix(rows, cols); }

bool Matrix::all_finite() const {
  for (double v : a) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Matrix operator*(const Matrix& x, const Matrix& y) {
  if (x.cols != y.rows) {
    throw Error(ErrorCode::DimensionMismatch,
                "cannot multiply " + std::to_string(x.rows) + "x" + std::to_string(x.cols) +
                    " by " + std::to_string(y.rows) + "x" + std::to_string(y.cols));
  }
  Matrix out(x.rows, y.cols);
  kernels::active_kernels().matmul(out.a.data(), x.a.data(), y.a.data(),
                                   x.rows, x.cols, y.cols);
  return out;
}

Matrix operator+(const Matrix& x, const Matrix& y) {
  if (x.rows != y.rows || x.cols != y.cols) {
    throw Error(ErrorCode::DimensionMismatch, "matrix sum shape mismatch");
  }
  Matrix out = x;
  for (size_t i = 0; i < out.a.size(); ++i) out.a[i] += y.a[i];
  return out;
}

Matrix operator-(const Matrix& x, const Matrix& y) {
  if (x.rows != y.rows || x.cols != y.cols) {
    throw Error(ErrorCode::DimensionMismatch, "matrix difference shape mismatch");
  }
  Matrix out = x;
  for (size_t i = 0; i < out.a.size(); ++i) out.a[i] -= y.a[i];
  return out;
}

void set_block(Matrix& dst, int i, int j, const Matrix& block) {
  if (i + block.rows > dst.rows || j + block.cols > dst.cols) {
    throw Error(ErrorCode::DimensionMismatch, "block does not fit");
  }
  for (int r = 0; r < block.rows; ++r) {
    for (int c = 0; c < block.cols; ++c) {
      dst.at(i + r, j + c) = block.at(r, c);
    }
  }
}

InvertResult invert(const Matrix& m, double eps) {
  if (m.rows != m.cols) {
    throw Error(ErrorCode::DimensionMismatch, "inversion needs a square matrix");
  }
  const int n = m.rows;
  const auto& k = kernels::active_kernels();

  // Augmented [m | I], eliminated in place.
  Matrix aug(n, 2 * n);
  set_block(aug, 0, 0, m);
  for (int i = 0; i < n; ++i) aug.at(i, n + i) = 1.0;

  for (int col = 0; col < n; ++col) {
    int pivot_row = col;
    double best = std::fabs(aug.at(col, col));
    for (int i = col + 1; i < n; ++i) {
      double v = std::fabs(aug.at(i, col));
      if (v > best) {
        best = v;
        pivot_row = i;
      }
    }
    if (best < eps) {
      InvertResult res;
      res.ok = false;
      res.failed_pivot = best;
      return res;
    }
    if (pivot_row != col) {
      for (int j = 0; j < 2 * n; ++j) {
        std::swap(aug.at(col, j), aug.at(pivot_row, j));
      }
    }
    double* prow = &aug.at(col, 0);
    k.row_scale(prow, 1.0 / aug.at(col, col), 2 * n);
    for (int i = 0; i < n; ++i) {
      if (i == col) continue;
      k.row_axpy(&aug.at(i, 0), prow, aug.at(i, col), 2 * n);
    }
  }

  InvertResult res;
  res.ok = true;
  res.inverse = Matrix(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      res.inverse.at(i, j) = aug.at(i, n + j);
    }
  }
  return res;
}

bool approx_equal(const Matrix& x, const Matrix& y, double tol) {
  if (x.rows != y.rows || x.cols != y.cols) return false;
  for (size_t i = 0; i < x.a.size(); ++i) {
    if (!(std::fabs(x.a[i] - y.a[i]) <= tol)) return false;
  }
  return true;
}

}  // namespace opwire
