#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "pevcond/errors.hpp"
#include "pevcond/matpoly.hpp"
#include "pevcond/matrix.hpp"
#include "pevcond/pevsolver.hpp"

namespace pevcond {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Right and left singular vectors for the smallest singular value of P at a point.
struct EigenTriple {
  Vector right;
  Vector left;
  double sigma_min = 0.0;
};

struct PevRecord {
  ProjectivePoint point;
  Vector right;
  Vector left;
  double sigma_min = 0.0;
  double local_mu = kInfinity;
  double residual = 0.0;
};

struct ConditionReport {
  std::vector<PevRecord> records;
  double total_mu = 0.0;
  bool degenerate = false;
  bool cluster_warning = false;
  std::optional<int> certified_count;
};

namespace detail {

inline void make_first_nonzero_positive(Vector& x) {
  for (double c : x) {
    if (c == 0.0) continue;
    if (c < 0.0)
      for (double& y : x) y = -y;
    return;
  }
}

inline Vector column(const Matrix& m, std::size_t j) {
  Vector c(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) c[i] = m(i, j);
  return c;
}

}  // namespace detail

inline constexpr double kEigResidualTol = 1e-8;

/// Smallest singular pair of P(A, pt) by one-sided Jacobi. The left vector comes
/// from a separate decomposition of P^T so it stays accurate when sigma_min ~ 0.
inline EigenTriple eigenvectors_at(const MatrixPolynomial& mp, const ProjectivePoint& pt) {
  const Matrix m = evaluate(mp, pt);
  const std::size_t n = m.rows();
  const Svd right = jacobi_svd(m);
  const Svd left = jacobi_svd(m.transpose());

  EigenTriple out;
  out.sigma_min = right.s[n - 1];
  out.right = detail::column(right.v, n - 1);
  out.left = detail::column(left.v, n - 1);
  detail::make_first_nonzero_positive(out.right);

  const Vector mr = m * out.right;
  const double proj = dot(out.left, mr);
  if (proj < 0.0)
    for (double& x : out.left) x = -x;
  else if (proj == 0.0)
    detail::make_first_nonzero_positive(out.left);

  // judged against |A|: at a simple root of an n = 1 problem |M| is itself sigma_min
  if (out.sigma_min > kEigResidualTol * frobenius_norm(mp)) throw NotAnEigenvalue("smallest singular value is not negligible");
  return out;
}

/// Relative condition number of the eigenvalue pt:
///   (sum_k a^2k b^(2d-2k))^(1/2) * |r| |l| / |l^T v| * |A|,
/// with v = b dP/da r - a dP/db r. Any unit representative is accepted.
inline PevRecord local_condition(const MatrixPolynomial& mp, const ProjectivePoint& pt) {
  const EigenTriple ev = eigenvectors_at(mp, pt);
  const Partials dp = evaluate_partials(mp, pt);
  const std::size_t d = mp.degree();

  const Vector pa = dp.d_alpha * ev.right;
  const Vector pb = dp.d_beta * ev.right;
  Vector v(pa.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = pt.beta * pa[i] - pt.alpha * pb[i];

  double weight = 0.0;
  const double a2 = pt.alpha * pt.alpha, b2 = pt.beta * pt.beta;
  for (std::size_t k = 0; k <= d; ++k)
    weight += std::pow(a2, static_cast<double>(k)) * std::pow(b2, static_cast<double>(d - k));

  const double lv = std::abs(dot(ev.left, v));
  const double cutoff = 1e-14 * (dp.d_alpha.frobenius_norm() + dp.d_beta.frobenius_norm());

  PevRecord rec;
  rec.point = pt;
  rec.sigma_min = ev.sigma_min;
  const double norm = frobenius_norm(mp);
  rec.residual = norm > 0.0 ? ev.sigma_min / norm : 0.0;
  rec.local_mu = lv <= cutoff ? kInfinity
                              : std::sqrt(weight) * norm2(ev.right) * norm2(ev.left) / lv * norm;
  rec.right = ev.right;
  rec.left = ev.left;
  return rec;
}

/// mu(A): sum of local condition numbers over all real eigenvalues, +inf when
/// det P vanishes identically.
inline ConditionReport total_condition(const MatrixPolynomial& mp) {
  const SolveOutcome sol = polynomial_eigenvalues(mp);
  ConditionReport report;
  if (sol.degenerate) {
    report.degenerate = true;
    report.total_mu = kInfinity;
    return report;
  }
  report.cluster_warning = sol.roots.cluster_warning;
  report.certified_count = sol.roots.certified_count;
  for (std::size_t i = 0; i < sol.roots.roots.size(); ++i) {
    PevRecord rec = local_condition(mp, sol.roots.roots[i]);
    rec.residual = sol.roots.residuals[i];
    report.total_mu += rec.local_mu;
    report.records.push_back(std::move(rec));
  }
  return report;
}

namespace detail {

inline ProjectivePoint nearest_root(const MatrixPolynomial& mp, const ProjectivePoint& target) {
  const SolveOutcome sol = polynomial_eigenvalues(mp);
  if (sol.degenerate || sol.roots.roots.empty()) throw RootTrackingLost("perturbed problem lost its eigenvalues");
  const ProjectivePoint* best = nullptr;
  double best_dist = kInfinity;
  for (const auto& r : sol.roots.roots) {
    const double dist = projective_distance(r, target);
    if (dist < best_dist) {
      best_dist = dist;
      best = &r;
    }
  }
  if (best_dist > 0.1) throw RootTrackingLost("nearest perturbed root is too far to pair");
  return *best;
}

}  // namespace detail

/// Relative condition number estimated by central differences of the root angle
/// along every elementary direction of the coefficient space. Default step is
/// 1e-6 |A|.
inline double finite_difference_condition(const MatrixPolynomial& mp, const ProjectivePoint& pt,
                                          std::optional<double> step = std::nullopt) {
  const double norm = frobenius_norm(mp);
  const double h = step.value_or(1e-6 * norm);
  const std::size_t n = mp.n();
  double grad_sq = 0.0;
  MatrixPolynomial work = mp;
  for (std::size_t i = 0; i <= mp.degree(); ++i)
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) {
        const double orig = mp.coeff(i)(r, c);
        work.coeff_mut(i)(r, c) = orig + h;
        const ProjectivePoint plus = detail::nearest_root(work, pt);
        work.coeff_mut(i)(r, c) = orig - h;
        const ProjectivePoint minus = detail::nearest_root(work, pt);
        work.coeff_mut(i)(r, c) = orig;
        const double g = projective_angle_delta(plus, minus) / (2.0 * h);
        grad_sq += g * g;
      }
  return norm * std::sqrt(grad_sq);
}

}  // namespace pevcond
