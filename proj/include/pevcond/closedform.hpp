#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string_view>

#include "pevcond/errors.hpp"

namespace pevcond {

// Lanczos approximation, g = 7, nine coefficients (Godfrey's set). Relative
// error of Gamma is below 2e-15 on the positive axis.
inline constexpr double kLanczosG = 7.0;
inline constexpr std::array<double, 9> kLanczosCoeffs = {
    0.99999999999980993,   676.5203681218851,      -1259.1392167224028,
    771.32342877765313,    -176.61502916214059,    12.507343278686905,
    -0.13857109526572012,  9.9843695780195716e-6,  1.5056327351493116e-7};

inline double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("log_gamma requires a finite x > 0");
  if (x < 0.5) {
    // reflection: Gamma(x) Gamma(1 - x) = pi / sin(pi x)
    return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) - log_gamma(1.0 - x);
  }
  const double z = x - 1.0;
  double series = kLanczosCoeffs[0];
  for (std::size_t i = 1; i < kLanczosCoeffs.size(); ++i) series += kLanczosCoeffs[i] / (z + static_cast<double>(i));
  const double t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(series);
}

namespace detail {

// Stirling correction lnGamma(x) - [(x - 1/2) ln x - x + ln(2 pi)/2], x >= 15.
inline double stirling_tail(double x) {
  const double r = 1.0 / x;
  const double r2 = r * r;
  return r * (1.0 / 12 - r2 * (1.0 / 360 - r2 * (1.0 / 1260 - r2 * (1.0 / 1680 - r2 / 1188))));
}

}  // namespace detail

/// Gamma(a) / Gamma(b). For large arguments the leading Stirling terms are
/// differenced analytically so the result keeps full relative precision.
inline double gamma_ratio(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
    throw DomainError("gamma_ratio requires positive finite arguments");
  if (a == b) return 1.0;
  if (std::min(a, b) >= 15.0) {
    const double diff = a - b;
    const double log_ratio = (a - 0.5) * std::log1p(diff / b) + diff * (std::log(b) - 1.0) +
                             detail::stirling_tail(a) - detail::stirling_tail(b);
    return std::exp(log_ratio);
  }
  return std::exp(log_gamma(a) - log_gamma(b));
}

enum class FormulaId {
  GaussianExact,
  GaussianAsymptotic,
  GoeEvenExact,
  GoeOddExact,
  GoeAsymptotic,
  SubspaceExact,
  UniversalBound,
  VolRatioFull,
  VolRatioSymEven,
  VolRatioSymOdd,
  VolRatioSymAsymptotic,
};

inline std::string_view to_string(FormulaId id) {
  switch (id) {
    case FormulaId::GaussianExact: return "GaussianExact";
    case FormulaId::GaussianAsymptotic: return "GaussianAsymptotic";
    case FormulaId::GoeEvenExact: return "GoeEvenExact";
    case FormulaId::GoeOddExact: return "GoeOddExact";
    case FormulaId::GoeAsymptotic: return "GoeAsymptotic";
    case FormulaId::SubspaceExact: return "SubspaceExact";
    case FormulaId::UniversalBound: return "UniversalBound";
    case FormulaId::VolRatioFull: return "VolRatioFull";
    case FormulaId::VolRatioSymEven: return "VolRatioSymEven";
    case FormulaId::VolRatioSymOdd: return "VolRatioSymOdd";
    case FormulaId::VolRatioSymAsymptotic: return "VolRatioSymAsymptotic";
  }
  return "?";
}

struct ClosedFormValue {
  double value = 0.0;
  FormulaId formula_id = FormulaId::GaussianExact;
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t k = 0;
  /// Set when an asymptotic stands in for an exact expression, or when the
  /// value is only formal (k = 1, where the unit sphere S^(k-2) is empty).
  bool approximate = false;
  bool formal = false;
};

namespace detail {

inline double dbl(std::size_t x) { return static_cast<double>(x); }

// sqrt(pi) Gamma((d+1)k/2) / Gamma(((d+1)k - 1)/2)
inline double subspace_prefactor(std::size_t k, std::size_t d) {
  const double m = dbl((d + 1) * k);
  return std::sqrt(std::numbers::pi) * gamma_ratio(m / 2.0, (m - 1.0) / 2.0);
}

}  // namespace detail

/// |Sigma ∩ S^(n^2-1)| / |S^(n^2-2)| for V = M(n, R).
inline ClosedFormValue vol_ratio_full(std::size_t n) {
  if (n == 0) throw DomainError("n must be positive");
  const double nn = detail::dbl(n);
  return {std::sqrt(std::numbers::pi) * gamma_ratio((nn + 1.0) / 2.0, nn / 2.0), FormulaId::VolRatioFull, n, 0, n * n};
}

inline constexpr std::size_t kOddSymExactLimit = 201;

inline ClosedFormValue vol_ratio_sym_asymptotic(std::size_t n) {
  if (n == 0) throw DomainError("n must be positive");
  return {2.0 * std::sqrt(detail::dbl(n) / std::numbers::pi), FormulaId::VolRatioSymAsymptotic, n, 0, n * (n + 1) / 2, true};
}

/// |Sigma ∩ S^(k-1)| / |S^(k-2)| for V = Sym(n, R), k = n(n+1)/2. Odd n above
/// 201 falls back to the asymptotic 2 sqrt(n / pi) and is flagged approximate.
inline ClosedFormValue vol_ratio_sym(std::size_t n) {
  if (n == 0) throw DomainError("n must be positive");
  const double nn = detail::dbl(n);
  const std::size_t k = n * (n + 1) / 2;
  if (n % 2 == 0) {
    const double v = std::sqrt(2.0 / std::numbers::pi) * nn * gamma_ratio((nn + 1.0) / 2.0, (nn + 2.0) / 2.0);
    return {v, FormulaId::VolRatioSymEven, n, 0, k};
  }
  if (n > kOddSymExactLimit) return vol_ratio_sym_asymptotic(n);

  const std::size_t m = (n - 1) / 2;
  // Kahan-compensated alternating sum of Gamma((2i+3)/2) / i!
  double sum = 0.0, comp = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double term = std::exp(log_gamma((2.0 * detail::dbl(i) + 3.0) / 2.0) - log_gamma(detail::dbl(i) + 1.0));
    const double y = (i % 2 == 0 ? term : -term) - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  const double log_pref = 0.5 * std::log(std::numbers::pi) + log_gamma(nn + 1.0) - nn * std::numbers::ln2 -
                          log_gamma(detail::dbl(m) + 1.0) - log_gamma((nn + 2.0) / 2.0);
  const double sign = m % 2 == 0 ? 1.0 : -1.0;
  const double bracket = 1.0 - 4.0 * std::numbers::sqrt2 / std::sqrt(std::numbers::pi) * sum;
  ClosedFormValue out{sign * std::exp(log_pref) * bracket, FormulaId::VolRatioSymOdd, n, 0, k};
  out.formal = (n == 1);
  return out;
}

/// E mu(A) for A_i i.i.d. standard normal on a k-dimensional subspace whose
/// singular locus has the given spherical volume ratio.
inline ClosedFormValue expected_mu_subspace(std::size_t k, std::size_t d, double vol_ratio) {
  if (k == 0 || d == 0) throw DomainError("k and d must be positive");
  if (!(vol_ratio >= 0.0) || !std::isfinite(vol_ratio)) throw DomainError("vol_ratio must be finite and nonnegative");
  ClosedFormValue out{detail::subspace_prefactor(k, d) * vol_ratio, FormulaId::SubspaceExact, 0, d, k};
  out.formal = (k == 1);
  return out;
}

/// pi Gamma((d+1)n^2/2) / Gamma(((d+1)n^2-1)/2) * Gamma((n+1)/2) / Gamma(n/2)
inline ClosedFormValue expected_mu_full_gaussian(std::size_t n, std::size_t d) {
  if (n == 0 || d == 0) throw DomainError("n and d must be positive");
  const double nn = detail::dbl(n);
  const double m = detail::dbl((d + 1) * n * n);
  const double v = std::numbers::pi * gamma_ratio(m / 2.0, (m - 1.0) / 2.0) * gamma_ratio((nn + 1.0) / 2.0, nn / 2.0);
  return {v, FormulaId::GaussianExact, n, d, n * n};
}

/// (pi/2) sqrt((d+1) n^3)
inline ClosedFormValue asymptotic_full_gaussian(std::size_t n, std::size_t d) {
  const double nn = detail::dbl(n);
  return {std::numbers::pi / 2.0 * std::sqrt(detail::dbl(d + 1) * nn * nn * nn), FormulaId::GaussianAsymptotic, n, d, n * n, true};
}

/// sqrt(pi) n Gamma((d+1)k/2) / Gamma(((d+1)k-1)/2)
inline ClosedFormValue upper_bound(std::size_t n, std::size_t k, std::size_t d) {
  if (n == 0 || k == 0 || d == 0) throw DomainError("n, k and d must be positive");
  ClosedFormValue out{detail::dbl(n) * detail::subspace_prefactor(k, d), FormulaId::UniversalBound, n, d, k};
  out.formal = (k == 1);
  return out;
}

/// E mu(A) for A_i i.i.d. GOE(n), via the subspace formula and the Sym(n) volume ratio.
inline ClosedFormValue expected_mu_goe(std::size_t n, std::size_t d) {
  if (n == 0 || d == 0) throw DomainError("n and d must be positive");
  const std::size_t k = n * (n + 1) / 2;
  const ClosedFormValue vol = vol_ratio_sym(n);
  ClosedFormValue out = expected_mu_subspace(k, d, vol.value);
  out.formula_id = n % 2 == 0 ? FormulaId::GoeEvenExact : FormulaId::GoeOddExact;
  out.n = n;
  out.approximate = vol.approximate;
  out.formal = vol.formal || out.formal;
  return out;
}

/// The even-n closed form written out directly:
/// sqrt(2) n Gamma((d+1)n(n+1)/4) / Gamma(((d+1)n(n+1)-2)/4) * Gamma((n+1)/2) / Gamma((n+2)/2).
inline ClosedFormValue expected_mu_goe_direct(std::size_t n, std::size_t d) {
  if (n == 0 || d == 0 || n % 2 != 0) throw DomainError("direct GOE formula needs even n >= 2 and d >= 1");
  const double nn = detail::dbl(n);
  const double m = detail::dbl((d + 1) * n * (n + 1));
  const double v = std::numbers::sqrt2 * nn * gamma_ratio(m / 4.0, (m - 2.0) / 4.0) *
                   gamma_ratio((nn + 1.0) / 2.0, (nn + 2.0) / 2.0);
  return {v, FormulaId::GoeEvenExact, n, d, n * (n + 1) / 2};
}

/// sqrt((d+1) n^3)
inline ClosedFormValue asymptotic_goe(std::size_t n, std::size_t d) {
  const double nn = detail::dbl(n);
  return {std::sqrt(detail::dbl(d + 1) * nn * nn * nn), FormulaId::GoeAsymptotic, n, d, n * (n + 1) / 2, true};
}

}  // namespace pevcond
