#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace lunet {

// Small dense row-major matrix. Everything in this library works on
// matrices of single-digit dimensions, so no blocking, no views.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0) : rows(r), cols(c), a(static_cast<size_t>(r) * c, fill) {
    if (r < 0 || c < 0) throw std::invalid_argument("Matrix: negative dimension");
  }
  Matrix(std::initializer_list<std::initializer_list<double>> init) {
    rows = static_cast<int>(init.size());
    cols = rows > 0 ? static_cast<int>(init.begin()->size()) : 0;
    a.reserve(static_cast<size_t>(rows) * cols);
    for (const auto& row : init) {
      if (static_cast<int>(row.size()) != cols) throw std::invalid_argument("Matrix: ragged init");
      a.insert(a.end(), row.begin(), row.end());
    }
  }

  double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

  bool operator==(const Matrix& o) const = default;

  static Matrix identity(int d) {
    Matrix m(d, d);
    for (int i = 0; i < d; ++i) m(i, i) = 1.0;
    return m;
  }
};

inline void matvec(const Matrix& m, std::span<const double> x, std::span<double> out) {
  for (int i = 0; i < m.rows; ++i) {
    double s = 0.0;
    const double* row = m.a.data() + static_cast<size_t>(i) * m.cols;
    for (int j = 0; j < m.cols; ++j) s += row[j] * x[j];
    out[i] = s;
  }
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows) throw std::invalid_argument("matmul: dimension mismatch");
  Matrix c(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int k = 0; k < a.cols; ++k) {
      double aik = a(i, k);
      for (int j = 0; j < b.cols; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

// Max absolute entry.
inline double max_norm(const Matrix& m) {
  double v = 0.0;
  for (double x : m.a) v = std::max(v, std::abs(x));
  return v;
}

// Induced sup-norm: max absolute row sum.
inline double inf_norm(const Matrix& m) {
  double v = 0.0;
  for (int i = 0; i < m.rows; ++i) {
    double s = 0.0;
    for (int j = 0; j < m.cols; ++j) s += std::abs(m(i, j));
    v = std::max(v, s);
  }
  return v;
}

// Euclidean operator norm estimated by power iteration on m^T m.
inline double op_norm_estimate(const Matrix& m, int iters = 50) {
  if (m.rows == 0 || m.cols == 0) return 0.0;
  std::vector<double> v(m.cols, 1.0), mv(m.rows), w(m.cols);
  v[0] += 0.5;  // break symmetry for matrices with an eigenvector orthogonal to ones
  double norm = 0.0;
  for (int it = 0; it < iters; ++it) {
    matvec(m, v, mv);
    for (int j = 0; j < m.cols; ++j) {
      double s = 0.0;
      for (int i = 0; i < m.rows; ++i) s += m(i, j) * mv[i];
      w[j] = s;
    }
    double len = 0.0;
    for (double x : w) len += x * x;
    len = std::sqrt(len);
    if (len == 0.0) return 0.0;
    for (int j = 0; j < m.cols; ++j) v[j] = w[j] / len;
    double num = 0.0;
    matvec(m, v, mv);
    for (double x : mv) num += x * x;
    norm = std::sqrt(num);
  }
  return norm;
}

}  // namespace lunet
