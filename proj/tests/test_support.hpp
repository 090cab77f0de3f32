#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "pevcond/ensembles.hpp"
#include "pevcond/matpoly.hpp"
#include "pevcond/matrix.hpp"
#include "pevcond/rng.hpp"

namespace testing_support {

inline Eigen::MatrixXd to_eigen(const pevcond::Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

inline pevcond::Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed, std::uint64_t stream = 0) {
  pevcond::NormalStream rng({seed, stream});
  pevcond::Matrix m(rows, cols);
  for (double& x : m.data()) x = rng.next_normal();
  return m;
}

inline pevcond::MatrixPolynomial random_poly(std::size_t n, std::size_t d, std::uint64_t seed, std::uint64_t stream = 0) {
  return pevcond::sample(pevcond::EnsembleSpec::gaussian(n, d), {seed, stream});
}

inline pevcond::ProjectivePoint random_point(std::uint64_t seed, std::uint64_t stream = 0) {
  pevcond::NormalStream rng({seed, stream});
  const double a = rng.next_normal(), b = rng.next_normal();
  return pevcond::ProjectivePoint::canonical(a, b);
}

inline double max_abs_diff(const pevcond::Matrix& a, const pevcond::Matrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

}  // namespace testing_support
