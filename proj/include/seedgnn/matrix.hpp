#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace seedgnn {

/// Dense row-major matrix of doubles. The only matrix type used throughout;
/// pair tensors, network weights and similarity matrices are all instances.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("Matrix: negative dimension");
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

  double* row_ptr(int i) { return data_.data() + static_cast<std::size_t>(i) * cols_; }
  const double* row_ptr(int i) const { return data_.data() + static_cast<std::size_t>(i) * cols_; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

  void fill(double v) { data_.assign(data_.size(), v); }

  bool all_finite() const {
    for (double v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

// ---------------------------------------------------------------------------
// Order-independent accumulation.
//
// Knuth's TwoSum splits a floating-point add into the rounded result and the
// exact residual. Accumulating the residuals separately keeps ~106 bits, so
// sums of nonnegative terms come out bit-identical regardless of the order in
// which the terms arrive. Reductions whose iteration order depends on node
// labels (neighbor sums, softmax denominators) go through this path; that is
// what makes forward passes bit-exact under graph relabeling.
// ---------------------------------------------------------------------------

inline void two_sum(double a, double b, double& s, double& err) {
  s = a + b;
  const double bv = s - a;
  err = (a - (s - bv)) + (b - bv);
}

struct StableAcc {
  double hi = 0.0;
  double lo = 0.0;
  void add(double x) {
    double s, e;
    two_sum(hi, x, s, e);
    hi = s;
    lo += e;
  }
  double value() const { return hi + lo; }
};

inline double stable_sum(const double* v, int n) {
  StableAcc acc;
  for (int i = 0; i < n; ++i) acc.add(v[i]);
  return acc.value();
}

// ---------------------------------------------------------------------------
// Dense kernels. Inner loops run over contiguous output columns; summation
// order per output element is fixed, independent of any threading above.
// ---------------------------------------------------------------------------

/// C = A * B
inline Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimensions differ");
  Matrix c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    const double* ar = a.row_ptr(i);
    double* cr = c.row_ptr(i);
    for (int k = 0; k < a.cols(); ++k) {
      const double av = ar[k];
      if (av == 0.0) continue;
      const double* br = b.row_ptr(k);
      for (int j = 0; j < b.cols(); ++j) cr[j] += av * br[j];
    }
  }
  return c;
}

/// C = A^T * B  (A is k x m, B is k x n, C is m x n)
inline Matrix matmul_at_b(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("matmul_at_b: row counts differ");
  Matrix c(a.cols(), b.cols());
  for (int k = 0; k < a.rows(); ++k) {
    const double* ar = a.row_ptr(k);
    const double* br = b.row_ptr(k);
    for (int i = 0; i < a.cols(); ++i) {
      const double av = ar[i];
      if (av == 0.0) continue;
      double* cr = c.row_ptr(i);
      for (int j = 0; j < b.cols(); ++j) cr[j] += av * br[j];
    }
  }
  return c;
}

/// C = A * B^T  (A is m x k, B is n x k, C is m x n)
inline Matrix matmul_a_bt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw std::invalid_argument("matmul_a_bt: col counts differ");
  Matrix c(a.rows(), b.rows());
  for (int i = 0; i < a.rows(); ++i) {
    const double* ar = a.row_ptr(i);
    double* cr = c.row_ptr(i);
    for (int j = 0; j < b.rows(); ++j) {
      const double* br = b.row_ptr(j);
      double dot = 0.0;
      for (int k = 0; k < a.cols(); ++k) dot += ar[k] * br[k];
      cr[j] = dot;
    }
  }
  return c;
}

inline Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

/// a += alpha * b
inline void add_scaled(Matrix& a, const Matrix& b, double alpha = 1.0) {
  if (!a.same_shape(b)) throw std::invalid_argument("add_scaled: shape mismatch");
  double* pa = a.data();
  const double* pb = b.data();
  for (std::size_t i = 0; i < a.size(); ++i) pa[i] += alpha * pb[i];
}

/// Frobenius inner product <a, b>.
inline double dot(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("dot: shape mismatch");
  double s = 0.0;
  const double* pa = a.data();
  const double* pb = b.data();
  for (std::size_t i = 0; i < a.size(); ++i) s += pa[i] * pb[i];
  return s;
}

inline double max_abs(const Matrix& a) {
  double m = 0.0;
  const double* p = a.data();
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(p[i]));
  return m;
}

}  // namespace seedgnn
