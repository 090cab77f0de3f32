#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "pevcond/matpoly.hpp"
#include "test_support.hpp"

using namespace pevcond;
using testing_support::max_abs_diff;
using testing_support::random_matrix;
using testing_support::random_point;
using testing_support::random_poly;

namespace {

MatrixPolynomial diag_example() { return MatrixPolynomial({Matrix{{2, 0}, {0, 3}}, Matrix{{-1, 0}, {0, -1}}}); }

Matrix rotation2(double t) { return Matrix{{std::cos(t), -std::sin(t)}, {std::sin(t), std::cos(t)}}; }

// Orthogonal (d+1)x(d+1) matrix from QR of a Gaussian matrix.
Matrix random_orthogonal_transform(std::size_t m, std::uint64_t seed) {
  const Eigen::MatrixXd g = testing_support::to_eigen(random_matrix(m, m, seed));
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
  Matrix out(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) out(i, j) = q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return out;
}

}  // namespace

TEST(ProjectivePoint, CanonicalRepresentative) {
  const auto p = ProjectivePoint::canonical(2, -1);
  EXPECT_GT(p.beta, 0.0);
  EXPECT_NEAR(p.alpha, -2 / std::sqrt(5.0), 1e-15);
  EXPECT_NEAR(p.beta, 1 / std::sqrt(5.0), 1e-15);
  const auto inf = ProjectivePoint::canonical(-3, 0);
  EXPECT_EQ(inf.alpha, 1.0);
  EXPECT_EQ(inf.beta, 0.0);
  EXPECT_TRUE(inf.is_canonical());
  EXPECT_THROW(ProjectivePoint::canonical(0, 0), DomainError);
}

TEST(ProjectivePoint, EqualityIsProjective) {
  const auto p = ProjectivePoint::canonical(1, 2);
  EXPECT_EQ(p, p.antipode());
  EXPECT_EQ(ProjectivePoint::canonical(1, 1e-14), ProjectivePoint::canonical(-1, 1e-14));
  EXPECT_FALSE(p == ProjectivePoint::canonical(1, 2.001));
  EXPECT_NEAR(projective_distance(ProjectivePoint{1, 0}, ProjectivePoint{0, 1}), std::numbers::pi / 2, 1e-15);
}

TEST(MatrixPolynomial, Validation) {
  EXPECT_THROW(MatrixPolynomial({Matrix::identity(2)}), InvalidPolynomial);
  EXPECT_THROW(MatrixPolynomial({Matrix::identity(2), Matrix::identity(3)}), InvalidPolynomial);
  EXPECT_THROW(MatrixPolynomial({Matrix(2, 3), Matrix(2, 3)}), InvalidPolynomial);
  EXPECT_THROW(MatrixPolynomial({Matrix{{NAN}}, Matrix{{1}}}), InvalidPolynomial);
  EXPECT_THROW(MatrixPolynomial({Matrix{{INFINITY}}, Matrix{{1}}}), InvalidPolynomial);
  EXPECT_THROW(MatrixPolynomial({Matrix(0, 0), Matrix(0, 0)}), InvalidPolynomial);
  const auto z = MatrixPolynomial::zeros(3, 2);
  EXPECT_EQ(z.n(), 3u);
  EXPECT_EQ(z.degree(), 2u);
}

TEST(Evaluate, DiagExample) {
  const auto mp = diag_example();
  EXPECT_EQ(evaluate(mp, 0, 1), (Matrix{{2, 0}, {0, 3}}));
  EXPECT_EQ(evaluate(mp, 1, 0), (Matrix{{-1, 0}, {0, -1}}));
  const Matrix m = evaluate(mp, 2 / std::sqrt(5.0), 1 / std::sqrt(5.0));
  EXPECT_NEAR(m(0, 0), 0.0, 1e-15);
  EXPECT_NEAR(m(1, 1), 1 / std::sqrt(5.0), 1e-15);
  EXPECT_EQ(m(0, 1), 0.0);
}

TEST(Evaluate, MatchesDirectPowerSum) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto mp = random_poly(3, 1 + s % 5, 100, s);
    const auto pt = random_point(101, s);
    Matrix ref(3, 3);
    for (std::size_t i = 0; i <= mp.degree(); ++i)
      ref.add_scaled(mp.coeff(i), std::pow(pt.alpha, static_cast<double>(i)) *
                                      std::pow(pt.beta, static_cast<double>(mp.degree() - i)));
    EXPECT_LT(max_abs_diff(evaluate(mp, pt), ref), 1e-13);
  }
}

TEST(Evaluate, Homogeneity) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto mp = random_poly(3, 2, 110, s);
    const auto pt = random_point(111, s);
    for (double t : {1e-3, 0.5, 7.0, 1e3}) {
      const Matrix lhs = evaluate(scale_coeffs(mp, t), pt);
      Matrix rhs = evaluate(mp, pt);
      rhs *= t;
      EXPECT_LT(max_abs_diff(lhs, rhs), 1e-14 * std::max(1.0, rhs.max_abs()));
    }
  }
}

TEST(EvaluatePartials, DiagExample) {
  const auto dp = evaluate_partials(diag_example(), ProjectivePoint::canonical(2, 1));
  EXPECT_EQ(dp.d_alpha, (Matrix{{-1, 0}, {0, -1}}));
  EXPECT_EQ(dp.d_beta, (Matrix{{2, 0}, {0, 3}}));
}

TEST(EvaluatePartials, SingleTermDegreeTwo) {
  const Matrix a0{{1, 2}, {3, 4}};
  const MatrixPolynomial mp({a0, Matrix(2, 2), Matrix(2, 2)});
  const auto dp = evaluate_partials(mp, ProjectivePoint{0, 1});
  EXPECT_EQ(dp.d_alpha, Matrix(2, 2));
  Matrix twice = a0;
  twice *= 2.0;
  EXPECT_EQ(dp.d_beta, twice);
}

TEST(EvaluatePartials, ZeroExponentTermsAreFiniteAtAxes) {
  const auto mp = random_poly(2, 3, 120);
  for (const auto& pt : {ProjectivePoint{1, 0}, ProjectivePoint{0, 1}}) {
    const auto dp = evaluate_partials(mp, pt);
    EXPECT_TRUE(dp.d_alpha.all_finite());
    EXPECT_TRUE(dp.d_beta.all_finite());
  }
  // at [1:0] only A_d and A_{d-1} contribute
  const auto dp = evaluate_partials(mp, ProjectivePoint{1, 0});
  Matrix expected = mp.coeff(3);
  expected *= 3.0;
  EXPECT_LT(max_abs_diff(dp.d_alpha, expected), 1e-15);
  EXPECT_LT(max_abs_diff(dp.d_beta, mp.coeff(2)), 1e-15);
}

TEST(EvaluatePartials, EulerIdentity) {
  for (std::size_t d = 1; d <= 6; ++d)
    for (std::size_t n = 1; n <= 6; ++n)
      for (std::uint64_t s = 0; s < 100; s += 17) {
        const auto mp = random_poly(n, d, 130 + d * 10 + n, s);
        const auto pt = random_point(131, s);
        const auto dp = evaluate_partials(mp, pt);
        Matrix lhs = dp.d_alpha;
        lhs *= pt.alpha;
        lhs.add_scaled(dp.d_beta, pt.beta);
        Matrix rhs = evaluate(mp, pt);
        rhs *= static_cast<double>(d);
        EXPECT_LT(max_abs_diff(lhs, rhs), 1e-12 * std::max(1.0, frobenius_norm(mp)));
      }
}

TEST(EvaluatePartials, MatchesFiniteDifferences) {
  const auto mp = random_poly(3, 3, 140);
  const double a = 0.6, b = 0.8, h = 1e-6;
  const auto dp = evaluate_partials(mp, ProjectivePoint{a, b});
  Matrix fa = evaluate(mp, a + h, b);
  fa -= evaluate(mp, a - h, b);
  fa *= 1 / (2 * h);
  Matrix fb = evaluate(mp, a, b + h);
  fb -= evaluate(mp, a, b - h);
  fb *= 1 / (2 * h);
  EXPECT_LT(max_abs_diff(dp.d_alpha, fa), 1e-8);
  EXPECT_LT(max_abs_diff(dp.d_beta, fb), 1e-8);
}

TEST(FrobeniusNorm, Examples) {
  EXPECT_EQ(frobenius_norm(MatrixPolynomial::zeros(3, 2)), 0.0);
  EXPECT_DOUBLE_EQ(frobenius_norm(MatrixPolynomial({Matrix::identity(2), Matrix{{-1, 0}, {0, -1}}})), 2.0);
  EXPECT_DOUBLE_EQ(frobenius_norm(diag_example()), std::sqrt(15.0));
}

TEST(ApplyCoefficientMap, IdentityLeavesPolynomialUnchanged) {
  const auto mp = random_poly(3, 2, 150);
  EXPECT_EQ(apply_coefficient_map(mp, BinaryFormBasis::monomial(2)), mp);
}

TEST(ApplyCoefficientMap, QuarterRotation) {
  const auto mp = random_poly(2, 1, 160);
  const auto out = apply_coefficient_map(mp, {rotation2(std::numbers::pi / 2)});
  Matrix neg = mp.coeff(0);
  neg *= -1.0;
  EXPECT_LT(max_abs_diff(out.coeff(0), mp.coeff(1)), 1e-15);
  EXPECT_LT(max_abs_diff(out.coeff(1), neg), 1e-15);
}

TEST(ApplyCoefficientMap, PointwiseBasisIdentity) {
  // sum_j f_j(a,b) A_j == sum_i a^i b^(d-i) A'_i, with f the basis encoded by t
  for (std::size_t d = 1; d <= 3; ++d) {
    const auto mp = random_poly(3, d, 170 + d);
    const BinaryFormBasis basis{random_matrix(d + 1, d + 1, 171 + d)};
    const auto mapped = apply_coefficient_map(mp, basis);
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto pt = random_point(172, s);
      const Matrix lhs = evaluate_in_basis(mp, basis, pt.alpha, pt.beta);
      const Matrix rhs = evaluate(mapped, pt);
      EXPECT_LT(max_abs_diff(lhs, rhs), 1e-12 * std::max(1.0, rhs.max_abs()));
      EXPECT_NEAR(determinant(lhs), determinant(rhs), 1e-12 * std::pow(frobenius_norm(mapped), 3.0));
    }
  }
}

TEST(ApplyCoefficientMap, OrthogonalPreservesNorm) {
  for (std::size_t d = 1; d <= 4; ++d) {
    const auto mp = random_poly(4, d, 180 + d);
    const auto out = apply_coefficient_map(mp, {random_orthogonal_transform(d + 1, 181 + d)});
    EXPECT_NEAR(frobenius_norm(out), frobenius_norm(mp), 1e-12 * frobenius_norm(mp));
  }
}

TEST(ApplyCoefficientMap, ComposesWithProduct) {
  const std::size_t d = 3;
  const auto mp = random_poly(3, d, 190);
  const Matrix g1 = random_orthogonal_transform(d + 1, 191), g2 = random_orthogonal_transform(d + 1, 192);
  const auto twice = apply_coefficient_map(apply_coefficient_map(mp, {g1}), {g2});
  const auto once = apply_coefficient_map(mp, {g1 * g2});
  for (std::size_t i = 0; i <= d; ++i) EXPECT_LT(max_abs_diff(twice.coeff(i), once.coeff(i)), 1e-12);
}

TEST(ApplyCoefficientMap, Errors) {
  const auto mp = random_poly(2, 2, 200);
  EXPECT_THROW(apply_coefficient_map(mp, BinaryFormBasis::monomial(1)), SingularTransform);
  EXPECT_THROW(apply_coefficient_map(mp, {Matrix(3, 3)}), SingularTransform);
  EXPECT_THROW(apply_coefficient_map(mp, {Matrix{{1, 2, 3}, {2, 4, 6}, {0, 0, 1}}}), SingularTransform);
}

TEST(TransformTwoSided, MatchesDefinition) {
  const auto mp = random_poly(3, 1, 210);
  const Matrix u = random_matrix(3, 3, 211), v = random_matrix(3, 3, 212);
  const auto out = transform_two_sided(mp, u, v);
  EXPECT_LT(max_abs_diff(out.coeff(1), u * mp.coeff(1) * v.transpose()), 1e-13);
}
