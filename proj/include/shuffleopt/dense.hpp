// Minimal dense matrix support for the revised simplex: row-major storage
// and Gauss-Jordan inversion with partial pivoting (used on refactorization).
#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

namespace shuffleopt {

class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, 0.0) {}

  static DenseMatrix identity(int n) {
    DenseMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }
  double* row(int i) { return a_.data() + static_cast<size_t>(i) * cols_; }
  const double* row(int i) const { return a_.data() + static_cast<size_t>(i) * cols_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> a_;
};

// Inverse via Gauss-Jordan with partial pivoting. Returns nullopt when the
// best available pivot falls below `pivot_tol` (numerically singular).
inline std::optional<DenseMatrix> invert(DenseMatrix m, double pivot_tol = 1e-11) {
  const int n = m.rows();
  if (n != m.cols()) return std::nullopt;
  DenseMatrix inv = DenseMatrix::identity(n);
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    double best = std::fabs(m(col, col));
    for (int r = col + 1; r < n; ++r) {
      double v = std::fabs(m(r, col));
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (best < pivot_tol) return std::nullopt;
    if (pivot != col) {
      for (int j = 0; j < n; ++j) {
        std::swap(m(pivot, j), m(col, j));
        std::swap(inv(pivot, j), inv(col, j));
      }
    }
    const double d = m(col, col);
    for (int j = 0; j < n; ++j) {
      m(col, j) /= d;
      inv(col, j) /= d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = m(r, col);
      if (f == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        m(r, j) -= f * m(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

}  // namespace shuffleopt
