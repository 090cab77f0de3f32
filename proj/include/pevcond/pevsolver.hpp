#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "pevcond/errors.hpp"
#include "pevcond/matpoly.hpp"
#include "pevcond/matrix.hpp"

namespace pevcond {

namespace tolerances {
inline constexpr double kDegeneracy = 1e-12;   // relative to |A|_F^n
inline constexpr double kInfinity = 1e-10;     // |c_deg| relative to max |c_i|
inline constexpr double kSturmPrune = 1e-14;   // remainder coefficient pruning
inline constexpr double kBisectionWidth = 1e-10;
inline constexpr double kNewtonResidual = 1e-13;
inline constexpr double kClusterAngle = 1e-7;
inline constexpr std::size_t kMaxDegree = 64;
}  // namespace tolerances

/// q(alpha, beta) = sum_i c_i alpha^i beta^(deg - i).
class BinaryForm {
 public:
  BinaryForm() = default;

  /// `input_scale` is the magnitude against which vanishing is judged; when
  /// omitted only the identically zero form is degenerate.
  explicit BinaryForm(std::vector<double> coeffs, std::optional<double> input_scale = std::nullopt)
      : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw DomainError("binary form needs at least one coefficient");
    for (double c : coeffs_) {
      if (!std::isfinite(c)) throw DomainError("binary form coefficients must be finite");
      scale_ = std::max(scale_, std::abs(c));
    }
    input_scale_ = input_scale.value_or(scale_);
    degenerate_ = scale_ <= tolerances::kDegeneracy * input_scale_;
  }

  std::size_t degree() const { return coeffs_.size() - 1; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  double scale() const { return scale_; }
  double input_scale() const { return input_scale_; }
  bool is_degenerate() const { return degenerate_; }

  double operator()(double alpha, double beta) const { return eval_homogeneous(coeffs_, alpha, beta); }

  /// d/dtheta q(cos theta, sin theta)
  double angle_derivative(double theta) const {
    const double a = std::cos(theta), b = std::sin(theta);
    const std::size_t m = degree();
    if (m == 0) return 0.0;
    std::vector<double> da(m), db(m);
    for (std::size_t i = 0; i < m; ++i) {
      da[i] = static_cast<double>(i + 1) * coeffs_[i + 1];
      db[i] = static_cast<double>(m - i) * coeffs_[i];
    }
    return -b * eval_homogeneous(da, a, b) + a * eval_homogeneous(db, a, b);
  }

  // Horner in whichever of beta/alpha, alpha/beta has modulus <= 1.
  static double eval_homogeneous(const std::vector<double>& c, double alpha, double beta) {
    const std::size_t m = c.size() - 1;
    if (std::abs(alpha) >= std::abs(beta)) {
      if (alpha == 0.0) return 0.0;
      const double s = beta / alpha;
      double acc = c[0];
      for (std::size_t i = 1; i <= m; ++i) acc = acc * s + c[i];
      return acc * std::pow(alpha, static_cast<double>(m));
    }
    const double s = alpha / beta;
    double acc = c[m];
    for (std::size_t i = m; i-- > 0;) acc = acc * s + c[i];
    return acc * std::pow(beta, static_cast<double>(m));
  }

 private:
  std::vector<double> coeffs_;
  double scale_ = 0.0;
  double input_scale_ = 0.0;
  bool degenerate_ = true;
};

struct RootSet {
  std::vector<ProjectivePoint> roots;
  std::optional<int> certified_count;
  std::vector<double> residuals;  // |q(root)| / scale
  bool cluster_warning = false;
};

/// Result of polynomial_eigenvalues; `degenerate` means det P vanishes identically.
struct SolveOutcome {
  BinaryForm form;
  bool degenerate = false;
  RootSet roots;
};

/// Coefficients of det P(A, t, 1) by Chebyshev evaluation-interpolation, with the
/// endpoint coefficients replaced by det(A_0) and det(A_d).
inline BinaryForm det_binary_form(const MatrixPolynomial& mp) {
  const std::size_t n = mp.n();
  const std::size_t d = mp.degree();
  const std::size_t deg = n * d;
  if (deg > tolerances::kMaxDegree) throw DegreeOverflow("n*d exceeds the interpolation budget of 64");

  const std::size_t nodes = deg + 1;
  const double radius = 1.0 + 1.0 / static_cast<double>(deg);
  std::vector<double> values(nodes);
  std::vector<double> angles(nodes);
  for (std::size_t j = 0; j < nodes; ++j) {
    angles[j] = std::numbers::pi * (static_cast<double>(j) + 0.5) / static_cast<double>(nodes);
    values[j] = determinant(evaluate(mp, radius * std::cos(angles[j]), 1.0));
  }

  // Chebyshev coefficients from discrete orthogonality at first-kind nodes.
  std::vector<double> cheb(nodes, 0.0);
  for (std::size_t k = 0; k < nodes; ++k) {
    double s = 0.0;
    for (std::size_t j = 0; j < nodes; ++j) s += values[j] * std::cos(static_cast<double>(k) * angles[j]);
    cheb[k] = (k == 0 ? 1.0 : 2.0) * s / static_cast<double>(nodes);
  }

  // sum_k cheb[k] T_k(x) -> monomials in x, then x = t / radius.
  std::vector<double> mono(nodes, 0.0);
  std::vector<double> t_prev(nodes, 0.0), t_cur(nodes, 0.0), t_next(nodes, 0.0);
  t_prev[0] = 1.0;
  mono[0] += cheb[0];
  if (nodes > 1) {
    t_cur[1] = 1.0;
    mono[1] += cheb[1];
  }
  for (std::size_t k = 2; k < nodes; ++k) {
    std::fill(t_next.begin(), t_next.end(), 0.0);
    for (std::size_t i = 0; i + 1 < nodes; ++i) t_next[i + 1] += 2.0 * t_cur[i];
    for (std::size_t i = 0; i < nodes; ++i) t_next[i] -= t_prev[i];
    for (std::size_t i = 0; i <= k; ++i) mono[i] += cheb[k] * t_next[i];
    std::swap(t_prev, t_cur);
    std::swap(t_cur, t_next);
  }
  double rpow = 1.0;
  for (std::size_t i = 0; i < nodes; ++i) {
    mono[i] /= rpow;
    rpow *= radius;
  }
  mono.front() = determinant(mp.coeff(0));
  mono.back() = determinant(mp.coeff(d));

  const double input_scale = std::pow(frobenius_norm(mp), static_cast<double>(n));
  return BinaryForm(std::move(mono), input_scale);
}

namespace detail {

using Poly = std::vector<double>;  // ascending coefficients

inline void trim_leading_zeros(Poly& p) {
  while (p.size() > 1 && p.back() == 0.0) p.pop_back();
}

inline double max_abs(const Poly& p) {
  double m = 0.0;
  for (double c : p) m = std::max(m, std::abs(c));
  return m;
}

inline Poly normalized(Poly p) {
  const double m = max_abs(p);
  if (m > 0.0)
    for (double& c : p) c /= m;
  return p;
}

/// Sign of p(t), evaluated in 1/t for |t| > 1 so large arguments cannot overflow.
inline int sign_at(const Poly& p, double t) {
  const std::size_t m = p.size() - 1;
  double v;
  if (std::abs(t) <= 1.0) {
    v = p[m];
    for (std::size_t i = m; i-- > 0;) v = v * t + p[i];
  } else {
    const double s = 1.0 / t;
    v = p[0];
    for (std::size_t i = 1; i <= m; ++i) v = v * s + p[i];
    if (t < 0.0 && (m % 2 == 1)) v = -v;
  }
  return (v > 0.0) - (v < 0.0);
}

inline Poly derivative(const Poly& p) {
  if (p.size() <= 1) return {0.0};
  Poly dp(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i) dp[i - 1] = static_cast<double>(i) * p[i];
  return dp;
}

/// Remainder of a / b (deg b >= 1); coefficients below the pruning threshold are zeroed.
inline Poly pruned_remainder(Poly a, const Poly& b) {
  const double amax = max_abs(a);
  double qmax = 0.0;
  while (a.size() >= b.size()) {
    const double q = a.back() / b.back();
    qmax = std::max(qmax, std::abs(q));
    const std::size_t shift = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= q * b[i];
    a.pop_back();
  }
  if (a.empty()) a.push_back(0.0);
  const double threshold = tolerances::kSturmPrune * std::max(amax, qmax * max_abs(b));
  for (double& c : a)
    if (std::abs(c) <= threshold) c = 0.0;
  trim_leading_zeros(a);
  return a;
}

inline bool is_zero_poly(const Poly& p) {
  return std::all_of(p.begin(), p.end(), [](double c) { return c == 0.0; });
}

/// Finite-part polynomial p(t) = q(t, 1) with negligible top coefficients dropped.
inline Poly finite_part(const BinaryForm& q, double top_tol) {
  Poly p = q.coeffs();
  while (p.size() > 1 && std::abs(p.back()) <= top_tol * q.scale()) p.pop_back();
  return p;
}

}  // namespace detail

/// Sturm sequence p, p', -rem(p, p'), ... in double precision, each member scaled to unit max-norm.
class SturmChain {
 public:
  /// Throws InconclusiveChain when a remainder collapses while the chain still
  /// has positive degree (a numerically multiple root).
  explicit SturmChain(detail::Poly p) {
    detail::trim_leading_zeros(p);
    chain_.push_back(detail::normalized(std::move(p)));
    if (chain_.back().size() <= 1) return;
    chain_.push_back(detail::normalized(detail::derivative(chain_.back())));
    while (chain_.back().size() > 1) {
      detail::Poly r = detail::pruned_remainder(chain_[chain_.size() - 2], chain_.back());
      if (detail::is_zero_poly(r)) throw InconclusiveChain("Sturm remainder collapsed before reaching a constant");
      for (double& c : r) c = -c;
      chain_.push_back(detail::normalized(std::move(r)));
    }
  }

  int variations(double t) const {
    int count = 0;
    int prev = 0;
    for (const auto& p : chain_) {
      const int s = detail::sign_at(p, t);
      if (s == 0) continue;
      if (prev != 0 && s != prev) ++count;
      prev = s;
    }
    return count;
  }

  const detail::Poly& base() const { return chain_.front(); }
  std::size_t length() const { return chain_.size(); }

 private:
  std::vector<detail::Poly> chain_;
};

namespace detail {

// Moves t off a root of p so that Sturm counts at t are well defined.
inline double nudge_off_root(const Poly& p, double t, double direction) {
  for (int i = 0; i < 8 && sign_at(p, t) == 0; ++i) t += direction * 1e-12 * std::max(1.0, std::abs(t)) * (1 << i);
  return t;
}

inline double cauchy_bound(const Poly& p) {
  const double lead = std::abs(p.back());
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) m = std::max(m, std::abs(p[i]) / lead);
  return 1.0 + m;
}

// Bracketed bisection then Newton polish of q(cos theta, sin theta) on [lo, hi].
inline double refine_angle(const BinaryForm& sign_form, const BinaryForm& q, double lo, double hi) {
  auto f = [&](double th) { return sign_form(std::cos(th), std::sin(th)); };
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo != 0.0 && fhi != 0.0 && (flo > 0.0) != (fhi > 0.0)) {
    while (hi - lo > tolerances::kBisectionWidth) {
      const double mid = 0.5 * (lo + hi);
      const double fm = f(mid);
      if (fm == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((fm > 0.0) == (flo > 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
  } else if (flo == 0.0) {
    hi = lo;
  } else if (fhi == 0.0) {
    lo = hi;
  }
  const double guard = 1e-9;
  const double blo = lo - guard, bhi = hi + guard;
  double x = 0.5 * (lo + hi);
  auto g = [&](double th) { return q(std::cos(th), std::sin(th)); };
  double gx = std::abs(g(x));
  for (int it = 0; it < 12; ++it) {
    const double deriv = q.angle_derivative(x);
    if (deriv == 0.0 || !std::isfinite(deriv)) break;
    const double step = g(x) / deriv;
    const double xn = x - step;
    if (!(xn >= blo && xn <= bhi)) break;
    const double gn = std::abs(g(xn));
    if (gn > gx) break;
    x = xn;
    gx = gn;
    if (std::abs(step) <= 4e-16 * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

// Grid scan over the angle for sign changes and tangential minima; used when the
// Sturm chain cannot certify the root count.
inline std::vector<double> scan_roots(const BinaryForm& finite_form, const BinaryForm& q, bool& tangential) {
  const std::size_t deg = finite_form.degree();
  const std::size_t grid = std::max<std::size_t>(1024, 128 * deg);
  const double eps_angle = 1e-9;
  const double h = (std::numbers::pi - 2 * eps_angle) / static_cast<double>(grid);
  auto f = [&](double th) { return finite_form(std::cos(th), std::sin(th)); };
  std::vector<double> th(grid + 1), fv(grid + 1);
  for (std::size_t i = 0; i <= grid; ++i) {
    th[i] = eps_angle + h * static_cast<double>(i);
    fv[i] = f(th[i]);
  }
  std::vector<double> found;
  for (std::size_t i = 0; i < grid; ++i) {
    if (fv[i] == 0.0) {
      found.push_back(th[i]);
      continue;
    }
    if (fv[i + 1] != 0.0 && (fv[i] > 0.0) != (fv[i + 1] > 0.0)) found.push_back(refine_angle(finite_form, q, th[i], th[i + 1]));
  }
  // |f| local minima without a sign change: even-multiplicity roots
  const double touch_tol = tolerances::kInfinity * finite_form.scale();
  for (std::size_t i = 1; i < grid; ++i) {
    const double a = std::abs(fv[i - 1]), b = std::abs(fv[i]), c = std::abs(fv[i + 1]);
    if (!(b <= a && b <= c)) continue;
    if ((fv[i - 1] > 0.0) != (fv[i + 1] > 0.0)) continue;
    // minimize |f| via Newton on f'
    double x = th[i];
    for (int it = 0; it < 40; ++it) {
      const double e = 1e-6;
      const double d1 = (finite_form.angle_derivative(x + e) - finite_form.angle_derivative(x - e)) / (2 * e);
      if (d1 == 0.0) break;
      const double step = finite_form.angle_derivative(x) / d1;
      const double xn = std::clamp(x - step, th[i - 1], th[i + 1]);
      if (std::abs(xn - x) < 1e-15) break;
      x = xn;
    }
    if (std::abs(f(x)) <= touch_tol) {
      found.push_back(x);
      tangential = true;
    }
  }
  std::sort(found.begin(), found.end());
  std::vector<double> unique;
  for (double x : found)
    if (unique.empty() || x - unique.back() > tolerances::kClusterAngle) unique.push_back(x);
    else tangential = true;
  return unique;
}

}  // namespace detail

/// Exact number of distinct real roots of p(t) = q(t, 1) in (t_lo, t_hi].
inline int sturm_root_count(const BinaryForm& q, double t_lo, double t_hi) {
  if (q.is_degenerate()) throw DegenerateForm("binary form vanishes identically");
  const SturmChain chain(detail::finite_part(q, tolerances::kSturmPrune));
  t_lo = detail::nudge_off_root(chain.base(), t_lo, 1.0);
  t_hi = detail::nudge_off_root(chain.base(), t_hi, 1.0);
  return chain.variations(t_lo) - chain.variations(t_hi);
}

/// All real roots of q on RP^1, as canonical points.
inline RootSet real_projective_roots(const BinaryForm& q) {
  if (q.is_degenerate()) throw DegenerateForm("binary form vanishes identically");
  RootSet out;

  const detail::Poly p = detail::finite_part(q, tolerances::kInfinity);
  const std::size_t stripped = q.coeffs().size() - p.size();
  const bool at_infinity = stripped > 0;
  if (stripped > 1) out.cluster_warning = true;
  const BinaryForm finite_form(p);

  std::vector<double> angles;
  std::optional<int> certified;
  if (p.size() > 1) {
    try {
      const SturmChain chain(p);
      const double bound = detail::cauchy_bound(p) * (1.0 + 1e-6) + 1e-6;
      const double lo = -bound, hi = bound;
      const int vlo = chain.variations(lo), vhi = chain.variations(hi);
      certified = vlo - vhi;

      struct Interval {
        double a, b;
        int va, vb;
      };
      std::vector<Interval> stack{{lo, hi, vlo, vhi}};
      std::vector<std::pair<double, double>> isolated;
      while (!stack.empty()) {
        const Interval iv = stack.back();
        stack.pop_back();
        const int count = iv.va - iv.vb;
        if (count <= 0) continue;
        const double width = iv.b - iv.a;
        if (count == 1) {
          isolated.emplace_back(iv.a, iv.b);
          continue;
        }
        if (width <= 1e-13 * std::max({1.0, std::abs(iv.a), std::abs(iv.b)})) {
          isolated.emplace_back(iv.a, iv.b);
          out.cluster_warning = true;
          continue;
        }
        // split near the midpoint, in log scale for wide brackets far from zero
        double mid = 0.5 * (iv.a + iv.b);
        mid = detail::nudge_off_root(chain.base(), mid, 1.0);
        if (!(mid > iv.a && mid < iv.b)) mid = 0.5 * (iv.a + iv.b);
        const int vm = chain.variations(mid);
        stack.push_back({iv.a, mid, iv.va, vm});
        stack.push_back({mid, iv.b, vm, iv.vb});
      }
      for (const auto& [a, b] : isolated) {
        // theta = atan2(1, t) decreases in t
        angles.push_back(detail::refine_angle(finite_form, q, std::atan2(1.0, b), std::atan2(1.0, a)));
      }
    } catch (const InconclusiveChain&) {
      bool tangential = false;
      angles = detail::scan_roots(finite_form, q, tangential);
      if (tangential) out.cluster_warning = true;
      certified.reset();
    }
  }

  std::sort(angles.begin(), angles.end());
  for (double th : angles) {
    const auto pt = ProjectivePoint::canonical(std::cos(th), std::sin(th));
    if (!out.roots.empty() && projective_distance(out.roots.back(), pt) <= ProjectivePoint::kTolerance) {
      out.cluster_warning = true;
      continue;
    }
    out.roots.push_back(pt);
  }
  if (at_infinity) {
    out.roots.push_back({1.0, 0.0});
    if (certified) *certified += 1;
  }
  for (std::size_t i = 0; i + 1 < out.roots.size(); ++i)
    for (std::size_t j = i + 1; j < out.roots.size(); ++j)
      if (projective_distance(out.roots[i], out.roots[j]) < tolerances::kClusterAngle) out.cluster_warning = true;

  const double scale = q.scale();
  for (const auto& r : out.roots) out.residuals.push_back(std::abs(q(r.alpha, r.beta)) / scale);
  out.certified_count = certified;
  return out;
}

inline SolveOutcome polynomial_eigenvalues(const MatrixPolynomial& mp) {
  SolveOutcome out;
  out.form = det_binary_form(mp);
  if (out.form.is_degenerate()) {
    out.degenerate = true;
    return out;
  }
  out.roots = real_projective_roots(out.form);
  return out;
}

}  // namespace pevcond
