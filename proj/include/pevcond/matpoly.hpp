#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "pevcond/errors.hpp"
#include "pevcond/matrix.hpp"

namespace pevcond {

/// A point [alpha : beta] of the real projective line, stored as a unit
/// representative. Equality compares canonical representatives.
struct ProjectivePoint {
  double alpha = 1.0;
  double beta = 0.0;

  static constexpr double kTolerance = 1e-12;

  /// Normalizes (a, b) to the unit circle and picks the upper half-circle
  /// representative: beta > 0, or beta == 0 with alpha == 1.
  static ProjectivePoint canonical(double a, double b) {
    const double r = std::hypot(a, b);
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("projective point needs a nonzero finite representative");
    a /= r;
    b /= r;
    if (b < 0.0 || (b == 0.0 && a < 0.0)) {
      a = -a;
      b = -b;
    }
    if (b == 0.0) a = 1.0;
    return {a, b};
  }

  /// Angle of the representative in (-pi, pi]; canonical points lie in [0, pi).
  double angle() const { return std::atan2(beta, alpha); }

  static ProjectivePoint from_angle(double theta) { return {std::cos(theta), std::sin(theta)}; }

  ProjectivePoint antipode() const { return {-alpha, -beta}; }

  bool is_canonical() const {
    return std::abs(alpha * alpha + beta * beta - 1.0) <= kTolerance &&
           (beta > 0.0 || (beta == 0.0 && alpha == 1.0));
  }

  friend bool operator==(const ProjectivePoint& p, const ProjectivePoint& q) {
    return projective_distance(p, q) <= kTolerance;
  }

  /// Angular distance on RP^1, in [0, pi/2].
  friend double projective_distance(const ProjectivePoint& p, const ProjectivePoint& q) {
    double diff = std::fmod(std::abs(p.angle() - q.angle()), std::numbers::pi);
    return std::min(diff, std::numbers::pi - diff);
  }
};

/// Signed angular difference p - q on RP^1, wrapped into (-pi/2, pi/2].
inline double projective_angle_delta(const ProjectivePoint& p, const ProjectivePoint& q) {
  double diff = std::remainder(p.angle() - q.angle(), std::numbers::pi);
  if (diff <= -std::numbers::pi / 2) diff += std::numbers::pi;
  return diff;
}

/// The homogeneous matrix polynomial P(A, alpha, beta) = sum_i alpha^i beta^(d-i) A_i.
class MatrixPolynomial {
 public:
  MatrixPolynomial() = default;

  explicit MatrixPolynomial(std::vector<Matrix> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.size() < 2) throw InvalidPolynomial("matrix polynomial needs degree >= 1");
    n_ = coeffs_.front().rows();
    if (n_ == 0) throw InvalidPolynomial("matrix dimension must be positive");
    for (const auto& a : coeffs_) {
      if (a.rows() != n_ || a.cols() != n_) throw InvalidPolynomial("coefficients must all be n x n");
      if (!a.all_finite()) throw InvalidPolynomial("coefficients must be finite");
    }
  }

  static MatrixPolynomial zeros(std::size_t n, std::size_t d) {
    return MatrixPolynomial(std::vector<Matrix>(d + 1, Matrix(n, n)));
  }

  std::size_t n() const { return n_; }
  std::size_t degree() const { return coeffs_.size() - 1; }

  const std::vector<Matrix>& coeffs() const { return coeffs_; }
  const Matrix& coeff(std::size_t i) const { return coeffs_.at(i); }

  /// Mutable access for perturbation; callers must keep entries finite.
  Matrix& coeff_mut(std::size_t i) { return coeffs_.at(i); }

  friend bool operator==(const MatrixPolynomial&, const MatrixPolynomial&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<Matrix> coeffs_;
};

/// A basis f_0..f_d of degree-d binary forms: f_i = sum_j transform(i, j) alpha^j beta^(d-j).
struct BinaryFormBasis {
  Matrix transform;

  static BinaryFormBasis monomial(std::size_t d) { return {Matrix::identity(d + 1)}; }

  std::size_t degree() const { return transform.rows() - 1; }
};

inline MatrixPolynomial scale_coeffs(MatrixPolynomial mp, double t) {
  for (std::size_t i = 0; i <= mp.degree(); ++i) mp.coeff_mut(i) *= t;
  return mp;
}

/// P(A, alpha, beta) for an arbitrary (not necessarily unit) representative.
inline Matrix evaluate(const MatrixPolynomial& mp, double alpha, double beta) {
  const std::size_t d = mp.degree();
  Matrix acc = mp.coeff(d);
  double beta_pow = 1.0;
  for (std::size_t i = d; i-- > 0;) {
    beta_pow *= beta;
    acc *= alpha;
    acc.add_scaled(mp.coeff(i), beta_pow);
  }
  return acc;
}

inline Matrix evaluate(const MatrixPolynomial& mp, const ProjectivePoint& pt) {
  return evaluate(mp, pt.alpha, pt.beta);
}

struct Partials {
  Matrix d_alpha;
  Matrix d_beta;
};

/// Exact partial derivatives with respect to alpha and beta.
inline Partials evaluate_partials(const MatrixPolynomial& mp, const ProjectivePoint& pt) {
  const std::size_t d = mp.degree();
  const std::size_t n = mp.n();
  std::vector<double> pa(d + 1, 1.0), pb(d + 1, 1.0);
  for (std::size_t k = 1; k <= d; ++k) {
    pa[k] = pa[k - 1] * pt.alpha;
    pb[k] = pb[k - 1] * pt.beta;
  }
  Partials out{Matrix(n, n), Matrix(n, n)};
  for (std::size_t i = 0; i <= d; ++i) {
    // zero exponent coefficients are skipped, never multiplied by a negative power
    if (i >= 1) out.d_alpha.add_scaled(mp.coeff(i), static_cast<double>(i) * pa[i - 1] * pb[d - i]);
    if (i + 1 <= d) out.d_beta.add_scaled(mp.coeff(i), static_cast<double>(d - i) * pa[i] * pb[d - i - 1]);
  }
  return out;
}

/// sqrt(sum_i |A_i|_F^2)
inline double frobenius_norm(const MatrixPolynomial& mp) {
  double s = 0.0;
  for (const auto& a : mp.coeffs()) s += a.frobenius_norm_squared();
  return std::sqrt(s);
}

/// A'_j = sum_i transform(i, j) A_i, so that sum_j f_j(alpha, beta) A_j equals the
/// monomial-basis evaluation of the result.
inline MatrixPolynomial apply_coefficient_map(const MatrixPolynomial& mp, const BinaryFormBasis& basis) {
  const Matrix& t = basis.transform;
  const std::size_t d = mp.degree();
  if (t.rows() != d + 1 || t.cols() != d + 1)
    throw SingularTransform("basis degree does not match the polynomial degree");
  if (!t.all_finite()) throw SingularTransform("transform has non-finite entries");

  // |det| compared against the Hadamard bound (product of row norms)
  double hadamard = 1.0;
  for (std::size_t i = 0; i <= d; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j <= d; ++j) row += t(i, j) * t(i, j);
    hadamard *= std::sqrt(row);
  }
  if (!(std::abs(determinant(t)) > 1e-10 * hadamard)) throw SingularTransform("basis transform is singular");

  const std::size_t n = mp.n();
  std::vector<Matrix> out(d + 1, Matrix(n, n));
  for (std::size_t j = 0; j <= d; ++j)
    for (std::size_t i = 0; i <= d; ++i)
      if (t(i, j) != 0.0) out[j].add_scaled(mp.coeff(i), t(i, j));
  return MatrixPolynomial(std::move(out));
}

/// sum_j f_j(alpha, beta) A_j for a general basis.
inline Matrix evaluate_in_basis(const MatrixPolynomial& mp, const BinaryFormBasis& basis, double alpha, double beta) {
  const std::size_t d = mp.degree();
  Matrix acc(mp.n(), mp.n());
  for (std::size_t i = 0; i <= d; ++i) {
    double f = 0.0;
    for (std::size_t j = 0; j <= d; ++j)
      f += basis.transform(i, j) * std::pow(alpha, static_cast<double>(j)) * std::pow(beta, static_cast<double>(d - j));
    acc.add_scaled(mp.coeff(i), f);
  }
  return acc;
}

/// Replaces every A_i by U A_i V^T.
inline MatrixPolynomial transform_two_sided(const MatrixPolynomial& mp, const Matrix& u, const Matrix& v) {
  std::vector<Matrix> out;
  out.reserve(mp.degree() + 1);
  const Matrix vt = v.transpose();
  for (const auto& a : mp.coeffs()) out.push_back(u * a * vt);
  return MatrixPolynomial(std::move(out));
}

}  // namespace pevcond
