#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "pevcond/errors.hpp"

namespace pevcond {

using Vector = std::vector<double>;

/// Dense real matrix, row-major storage.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
      if (row.size() != cols_) throw InvalidPolynomial("ragged matrix initializer");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix diagonal(std::span<const double> diag) {
    Matrix m(diag.size(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  double frobenius_norm_squared() const {
    return std::inner_product(data_.begin(), data_.end(), data_.begin(), 0.0);
  }
  double frobenius_norm() const { return std::sqrt(frobenius_norm_squared()); }

  double max_abs() const {
    double m = 0.0;
    for (double x : data_) m = std::max(m, std::abs(x));
    return m;
  }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
  }

  /// this += s * other
  void add_scaled(const Matrix& other, double s) {
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += s * other.data_[i];
  }

  Matrix& operator*=(double s) {
    for (double& x : data_) x *= s;
    return *this;
  }
  Matrix& operator+=(const Matrix& o) {
    add_scaled(o, 1.0);
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    add_scaled(o, -1.0);
    return *this;
  }

  friend Matrix operator*(Matrix m, double s) { return m *= s; }
  friend Matrix operator*(double s, Matrix m) { return m *= s; }
  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const double aik = a(i, k);
        if (aik == 0.0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend Vector operator*(const Matrix& a, std::span<const double> x) {
    Vector y(a.rows_, 0.0);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t j = 0; j < a.cols_; ++j) y[i] += a(i, j) * x[j];
    return y;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

/// Determinant by LU factorization with partial pivoting.
inline double determinant(Matrix m) {
  const std::size_t n = m.rows();
  double det = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(m(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(m(i, k)) > best) {
        best = std::abs(m(i, k));
        piv = i;
      }
    }
    if (best == 0.0) return 0.0;
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
      det = -det;
    }
    const double pivot = m(k, k);
    det *= pivot;
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = m(i, k) / pivot;
      if (f == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) m(i, j) -= f * m(k, j);
    }
  }
  return det;
}

/// Thin SVD M = U diag(s) V^T of a square matrix; singular values descending.
struct Svd {
  Matrix u;
  Vector s;
  Matrix v;
};

namespace detail {

// Fills zero (or numerically zero) columns of `u` so that its columns form an
// orthonormal basis. `ok[j]` marks columns that are already valid.
inline void complete_orthonormal_columns(Matrix& u, std::vector<bool> ok) {
  const std::size_t n = u.rows();
  std::size_t next_unit = 0;
  for (std::size_t j = 0; j < u.cols(); ++j) {
    if (ok[j]) continue;
    while (next_unit < n) {
      Vector c(n, 0.0);
      c[next_unit++] = 1.0;
      // two passes of Gram-Schmidt against the valid columns
      for (int pass = 0; pass < 2; ++pass)
        for (std::size_t q = 0; q < u.cols(); ++q) {
          if (!ok[q]) continue;
          double proj = 0.0;
          for (std::size_t i = 0; i < n; ++i) proj += u(i, q) * c[i];
          for (std::size_t i = 0; i < n; ++i) c[i] -= proj * u(i, q);
        }
      const double nc = norm2(c);
      if (nc > 1e-8) {
        for (std::size_t i = 0; i < n; ++i) u(i, j) = c[i] / nc;
        ok[j] = true;
        break;
      }
    }
  }
}

}  // namespace detail

/// One-sided (Hestenes) Jacobi SVD. Sweeps until every column pair satisfies
/// |u_p . u_q| <= tol * |u_p| |u_q|.
inline Svd jacobi_svd(const Matrix& m, double tol = 1e-14, int max_sweeps = 60) {
  const std::size_t n = m.cols();
  const std::size_t rows = m.rows();
  Matrix a = m;
  Matrix v = Matrix::identity(n);

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < rows; ++i) {
          alpha += a(i, p) * a(i, p);
          beta += a(i, q) * a(i, q);
          gamma += a(i, p) * a(i, q);
        }
        if (gamma == 0.0 || std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < rows; ++i) {
          const double ap = a(i, p), aq = a(i, q);
          a(i, p) = c * ap - s * aq;
          a(i, q) = s * ap + c * aq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vp = v(i, p), vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }

  Vector s(n);
  for (std::size_t j = 0; j < n; ++j) {
    double ss = 0.0;
    for (std::size_t i = 0; i < rows; ++i) ss += a(i, j) * a(i, j);
    s[j] = std::sqrt(ss);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return s[x] > s[y]; });

  Svd out{Matrix(rows, n), Vector(n), Matrix(n, n)};
  std::vector<bool> ok(n, false);
  for (std::size_t jj = 0; jj < n; ++jj) {
    const std::size_t j = order[jj];
    out.s[jj] = s[j];
    for (std::size_t i = 0; i < n; ++i) out.v(i, jj) = v(i, j);
    if (s[j] > 0.0) {
      for (std::size_t i = 0; i < rows; ++i) out.u(i, jj) = a(i, j) / s[j];
      ok[jj] = true;
    }
  }
  if (rows == n) detail::complete_orthonormal_columns(out.u, ok);
  return out;
}

}  // namespace pevcond
