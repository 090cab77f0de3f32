#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "pevcond/closedform.hpp"

using namespace pevcond;

namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrtPi = std::sqrt(kPi);

double rel(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }

}  // namespace

TEST(LogGamma, Examples) {
  EXPECT_NEAR(log_gamma(1.0), 0.0, 1e-15);
  EXPECT_NEAR(log_gamma(2.0), 0.0, 1e-15);
  EXPECT_NEAR(log_gamma(0.5), 0.5723649429247001, 1e-14);
  EXPECT_NEAR(log_gamma(10.0), 12.801827480081469, 1e-13);
}

TEST(LogGamma, MatchesStdLgamma) {
  for (double x = 1e-3; x <= 1e7; x *= 1.37) {
    const double ref = std::lgamma(x);
    EXPECT_NEAR(log_gamma(x), ref, 1e-10 * std::max(1.0, std::abs(ref))) << x;
  }
  for (double x = 0.05; x < 40; x += 0.25) EXPECT_NEAR(log_gamma(x), std::lgamma(x), 1e-12 * std::max(1.0, std::abs(std::lgamma(x))));
}

TEST(LogGamma, DomainErrors) {
  EXPECT_THROW(log_gamma(0.0), DomainError);
  EXPECT_THROW(log_gamma(-1.5), DomainError);
  EXPECT_THROW(log_gamma(NAN), DomainError);
  EXPECT_THROW(log_gamma(INFINITY), DomainError);
}

TEST(GammaRatio, Examples) {
  EXPECT_NEAR(gamma_ratio(4, 3.5), 48 / (15 * kSqrtPi), 1e-14);
  for (double a : {0.3, 1.0, 7.5, 40.0, 1e5}) EXPECT_NEAR(gamma_ratio(a, a), 1.0, 1e-15);
  EXPECT_THROW(gamma_ratio(0, 1), DomainError);
  EXPECT_THROW(gamma_ratio(1, -2), DomainError);
}

TEST(GammaRatio, LargeArgumentAsymptotic) {
  for (double x : {10.0, 100.0, 1000.0}) EXPECT_LE(std::abs(gamma_ratio(x + 0.5, x) / std::sqrt(x) - 1), 0.13 / x);
}

TEST(GammaRatio, MatchesLgammaDifference) {
  for (double a = 0.75; a < 5e5; a *= 1.9)
    for (double s : {-1.0, -0.5, 0.5, 1.0, 2.5}) {
      const double b = a + s;
      if (b <= 0) continue;
      const double ref = std::exp(std::lgamma(a) - std::lgamma(b));
      // the reference loses about |lgamma(a)| ulps; that is the comparison floor
      const double tol = 1e-13 + 4e-16 * std::abs(std::lgamma(a));
      EXPECT_LE(rel(gamma_ratio(a, b), ref), tol) << a << " " << b;
    }
}

TEST(GammaRatio, HalfIntegerSpotChecks) {
  // Gamma((p+1)/2) / Gamma(p/2) for p = 4, 9, 16
  EXPECT_LE(rel(gamma_ratio(2.5, 2.0), 3 * kSqrtPi / 4), 1e-12);
  EXPECT_LE(rel(gamma_ratio(5.0, 4.5), 384 / (105 * kSqrtPi)), 1e-12);
  EXPECT_LE(rel(gamma_ratio(8.5, 8.0), 2027025 * kSqrtPi / 256 / 5040), 1e-12);
}

TEST(FullGaussian, Examples) {
  EXPECT_NEAR(expected_mu_full_gaussian(1, 1).value, 1.0, 1e-10);
  EXPECT_LE(rel(expected_mu_full_gaussian(2, 1).value, 1.6 * kPi), 1e-13);
  EXPECT_LE(rel(expected_mu_full_gaussian(1, 2).value, kPi / 2), 1e-13);
  // high-precision reference value for (3, 2)
  EXPECT_LE(rel(expected_mu_full_gaussian(3, 2).value, 12.659067844988049), 1e-13);
  EXPECT_EQ(expected_mu_full_gaussian(3, 2).formula_id, FormulaId::GaussianExact);
  EXPECT_THROW(expected_mu_full_gaussian(0, 1), DomainError);
}

TEST(FullGaussian, Asymptotic) {
  EXPECT_NEAR(asymptotic_full_gaussian(4, 1).value, kPi / 2 * std::sqrt(128.0), 1e-12);
  EXPECT_NEAR(asymptotic_full_gaussian(1, 3).value, kPi, 1e-15);
  EXPECT_TRUE(asymptotic_full_gaussian(4, 1).approximate);
  double prev = 1.0;
  for (std::size_t n : {8, 16, 32, 64}) {
    const double r = expected_mu_full_gaussian(n, 1).value / asymptotic_full_gaussian(n, 1).value;
    if (n == 16) {
      EXPECT_LE(std::abs(r - 1), 0.10);
    }
    EXPECT_LT(std::abs(r - 1), prev);
    prev = std::abs(r - 1);
  }
  EXPECT_NEAR(expected_mu_full_gaussian(16, 1).value / asymptotic_full_gaussian(16, 1).value, 0.98306, 1e-5);
}

TEST(Subspace, Examples) {
  EXPECT_LE(rel(expected_mu_subspace(3, 1, std::sqrt(2.0)).value, 8 * std::sqrt(2.0) / 3), 1e-14);
  EXPECT_EQ(expected_mu_subspace(3, 1, 0.0).value, 0.0);
  EXPECT_TRUE(expected_mu_subspace(1, 1, 1.0).formal);
  EXPECT_THROW(expected_mu_subspace(0, 1, 1.0), DomainError);
  EXPECT_THROW(expected_mu_subspace(3, 1, -1.0), DomainError);
  EXPECT_THROW(expected_mu_subspace(3, 1, INFINITY), DomainError);
}

TEST(Subspace, GaussianCompositionIdentity) {
  for (std::size_t n = 1; n <= 8; ++n)
    for (std::size_t d = 1; d <= 4; ++d) {
      const double composed = expected_mu_subspace(n * n, d, vol_ratio_full(n).value).value;
      EXPECT_LE(rel(composed, expected_mu_full_gaussian(n, d).value), 1e-12) << n << "," << d;
    }
}

TEST(UpperBound, Examples) {
  EXPECT_NEAR(upper_bound(2, 4, 1).value, 6.4, 1e-13);
  EXPECT_NEAR(upper_bound(1, 1, 1).value, 1.0, 1e-14);
  EXPECT_EQ(upper_bound(2, 4, 1).formula_id, FormulaId::UniversalBound);
  EXPECT_THROW(upper_bound(0, 1, 1), DomainError);
}

TEST(UpperBound, DominatesExactValues) {
  for (std::size_t n = 1; n <= 8; ++n)
    for (std::size_t d = 1; d <= 4; ++d) {
      EXPECT_GE(upper_bound(n, n * n, d).value * (1 + 1e-14), expected_mu_full_gaussian(n, d).value);
      EXPECT_GE(upper_bound(n, n * (n + 1) / 2, d).value * (1 + 1e-14), expected_mu_goe(n, d).value);
    }
}

TEST(VolRatioFull, Examples) {
  EXPECT_NEAR(vol_ratio_full(1).value, 1.0, 1e-14);
  EXPECT_NEAR(vol_ratio_full(2).value, kPi / 2, 1e-14);
  double prev = 0;
  for (std::size_t n = 1; n <= 200; ++n) {
    const double v = vol_ratio_full(n).value;
    EXPECT_GT(v, prev);
    prev = v;
  }
  EXPECT_NEAR(vol_ratio_full(10000).value / std::sqrt(kPi * 10000 / 2), 1.0, 1e-4);
}

TEST(VolRatioSym, Examples) {
  EXPECT_NEAR(vol_ratio_sym(2).value, std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(vol_ratio_sym(3).value, 2 * std::sqrt(2.0) - 1, 1e-14);
  EXPECT_EQ(vol_ratio_sym(2).formula_id, FormulaId::VolRatioSymEven);
  EXPECT_EQ(vol_ratio_sym(3).formula_id, FormulaId::VolRatioSymOdd);
  EXPECT_NEAR(vol_ratio_sym(1).value, 1.0, 1e-14);
  EXPECT_TRUE(vol_ratio_sym(1).formal);
  EXPECT_THROW(vol_ratio_sym(0), DomainError);
}

TEST(VolRatioSym, HighPrecisionReferences) {
  const std::pair<std::size_t, double> refs[] = {
      {4, 2.1213203435596426},  {5, 2.4142135623730950},  {7, 2.8890872965260114},  {9, 3.2980970388562795},
      {16, 4.4435860712260091}, {25, 5.5869312119342287}, {36, 6.7234280748919956}, {51, 8.0192297143165474},
      {101, 11.312175931593799}};
  for (const auto& [n, v] : refs) EXPECT_LE(rel(vol_ratio_sym(n).value, v), 1e-12) << n;
  // cancellation in the alternating sum grows with n
  EXPECT_LE(rel(vol_ratio_sym(151).value, 13.842894341808294), 1e-11);
  EXPECT_LE(rel(vol_ratio_sym(201).value, 15.977700397279887), 1e-11);
}

TEST(VolRatioSym, AsymptoticEnvelope) {
  for (std::size_t n : {4, 9, 16, 25, 36}) {
    const double dev = std::abs(vol_ratio_sym(n).value * kSqrtPi / (2 * std::sqrt(double(n))) - 1);
    EXPECT_LE(dev, 0.5 / std::sqrt(double(n))) << n;
  }
}

TEST(VolRatioSym, LargeOddFallsBackToAsymptotic) {
  const auto v = vol_ratio_sym(203);
  EXPECT_TRUE(v.approximate);
  EXPECT_EQ(v.formula_id, FormulaId::VolRatioSymAsymptotic);
  EXPECT_NEAR(v.value, 2 * std::sqrt(203 / kPi), 1e-12);
  EXPECT_FALSE(vol_ratio_sym(201).approximate);
  EXPECT_FALSE(vol_ratio_sym(1000).approximate);
}

TEST(Goe, Examples) {
  EXPECT_LE(rel(expected_mu_goe(2, 1).value, 8 * std::sqrt(2.0) / 3), 1e-14);
  EXPECT_LE(rel(expected_mu_goe(2, 1).value, expected_mu_goe_direct(2, 1).value), 1e-12);
  const double composed3 = kSqrtPi * gamma_ratio(6, 5.5) * (2 * std::sqrt(2.0) - 1);
  EXPECT_LE(rel(expected_mu_goe(3, 1).value, composed3), 1e-12);
  EXPECT_LE(rel(expected_mu_goe(3, 1).value, 7.4297991100795876), 1e-12);
  EXPECT_EQ(expected_mu_goe(3, 1).formula_id, FormulaId::GoeOddExact);
  EXPECT_EQ(expected_mu_goe(4, 1).formula_id, FormulaId::GoeEvenExact);
  EXPECT_TRUE(expected_mu_goe(1, 2).formal);
  EXPECT_THROW(expected_mu_goe_direct(3, 1), DomainError);
}

TEST(Goe, EvenDualPathIdentity) {
  for (std::size_t n = 2; n <= 8; n += 2)
    for (std::size_t d = 1; d <= 4; ++d)
      EXPECT_LE(rel(expected_mu_goe(n, d).value, expected_mu_goe_direct(n, d).value), 1e-12) << n << "," << d;
}

TEST(Goe, Asymptotic) {
  double prev = 1.0;
  for (std::size_t n : {8, 16, 32, 64}) {
    const double r = expected_mu_goe(n, 1).value / asymptotic_goe(n, 1).value;
    if (n == 16) {
      EXPECT_LE(std::abs(r - 1), 0.25);
    }
    EXPECT_LT(std::abs(r - 1), prev);
    prev = std::abs(r - 1);
  }
}

TEST(ClosedForms, PositiveAndFiniteOverRange) {
  for (std::size_t n : {1, 2, 5, 20, 100, 400})
    for (std::size_t d : {1, 3, 6}) {
      if ((d + 1) * n * n > 1000000) continue;
      for (double v : {expected_mu_full_gaussian(n, d).value, expected_mu_goe(n, d).value,
                       upper_bound(n, n * n, d).value, asymptotic_goe(n, d).value}) {
        EXPECT_TRUE(std::isfinite(v));
        EXPECT_GT(v, 0.0);
      }
    }
  EXPECT_TRUE(std::isfinite(expected_mu_subspace(500000, 1, 1.0).value));
}

TEST(FormulaId, Names) {
  EXPECT_EQ(to_string(FormulaId::GoeOddExact), "GoeOddExact");
  EXPECT_EQ(to_string(FormulaId::VolRatioSymAsymptotic), "VolRatioSymAsymptotic");
}
