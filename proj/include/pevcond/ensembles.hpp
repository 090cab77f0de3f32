#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "pevcond/errors.hpp"
#include "pevcond/matpoly.hpp"
#include "pevcond/matrix.hpp"
#include "pevcond/rng.hpp"

namespace pevcond {

enum class EnsembleKind { FullGaussian, Goe, Subspace };

inline std::string_view to_string(EnsembleKind k) {
  switch (k) {
    case EnsembleKind::FullGaussian: return "gaussian";
    case EnsembleKind::Goe: return "goe";
    case EnsembleKind::Subspace: return "subspace";
  }
  return "?";
}

inline EnsembleKind ensemble_kind_from_string(std::string_view s) {
  if (s == "gaussian") return EnsembleKind::FullGaussian;
  if (s == "goe") return EnsembleKind::Goe;
  if (s == "subspace") return EnsembleKind::Subspace;
  throw ConfigError("unknown ensemble '" + std::string(s) + "'");
}

/// Frobenius-orthonormal basis of Sym(n): E_ii and (E_ij + E_ji)/sqrt(2), i < j.
inline std::vector<Matrix> sym_orthonormal_basis(std::size_t n) {
  std::vector<Matrix> basis;
  basis.reserve(n * (n + 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    Matrix e(n, n);
    e(i, i) = 1.0;
    basis.push_back(std::move(e));
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      Matrix e(n, n);
      e(i, j) = e(j, i) = 1.0 / std::numbers::sqrt2;
      basis.push_back(std::move(e));
    }
  return basis;
}

inline double frobenius_inner(const Matrix& a, const Matrix& b) { return dot(a.data(), b.data()); }

struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::FullGaussian;
  std::size_t n = 1;
  std::size_t d = 1;
  std::vector<Matrix> basis;  // Subspace only

  static EnsembleSpec gaussian(std::size_t n, std::size_t d) { return {EnsembleKind::FullGaussian, n, d, {}}; }
  static EnsembleSpec goe(std::size_t n, std::size_t d) { return {EnsembleKind::Goe, n, d, {}}; }
  static EnsembleSpec subspace(std::size_t n, std::size_t d, std::vector<Matrix> basis) {
    return {EnsembleKind::Subspace, n, d, std::move(basis)};
  }

  /// k = dim V.
  std::size_t dimension() const {
    switch (kind) {
      case EnsembleKind::FullGaussian: return n * n;
      case EnsembleKind::Goe: return n * (n + 1) / 2;
      case EnsembleKind::Subspace: return basis.size();
    }
    return 0;
  }

  void validate() const {
    if (n == 0 || d == 0) throw ConfigError("ensemble needs n >= 1 and d >= 1");
    if (kind != EnsembleKind::Subspace) return;
    if (basis.empty()) throw BadBasis("subspace basis is empty");
    for (const auto& b : basis)
      if (b.rows() != n || b.cols() != n) throw BadBasis("basis matrices must be n x n");
    for (std::size_t i = 0; i < basis.size(); ++i)
      for (std::size_t j = i; j < basis.size(); ++j) {
        const double g = frobenius_inner(basis[i], basis[j]);
        if (std::abs(g - (i == j ? 1.0 : 0.0)) > 1e-10) throw BadBasis("basis is not Frobenius-orthonormal");
      }
  }
};

/// One draw A = (A_0..A_d) from the ensemble; reproducible from the key alone.
/// GOE uses (G + G^T)/2: diagonal variance 1, off-diagonal variance 1/2.
inline MatrixPolynomial sample(const EnsembleSpec& spec, RngKey key) {
  spec.validate();
  NormalStream rng(key);
  const std::size_t n = spec.n;
  std::vector<Matrix> coeffs;
  coeffs.reserve(spec.d + 1);
  for (std::size_t i = 0; i <= spec.d; ++i) {
    Matrix a(n, n);
    switch (spec.kind) {
      case EnsembleKind::FullGaussian:
        for (double& x : a.data()) x = rng.next_normal();
        break;
      case EnsembleKind::Goe: {
        Matrix g(n, n);
        for (double& x : g.data()) x = rng.next_normal();
        for (std::size_t r = 0; r < n; ++r)
          for (std::size_t c = 0; c < n; ++c) a(r, c) = 0.5 * (g(r, c) + g(c, r));
        break;
      }
      case EnsembleKind::Subspace:
        for (const auto& b : spec.basis) a.add_scaled(b, rng.next_normal());
        break;
    }
    coeffs.push_back(std::move(a));
  }
  return MatrixPolynomial(std::move(coeffs));
}

/// Haar-distributed orthogonal n x n matrix: Gram-Schmidt QR of a Gaussian
/// matrix with the signs of R's diagonal absorbed.
inline Matrix random_orthogonal(std::size_t n, RngKey key) {
  NormalStream rng(key);
  Matrix q(n, n);
  for (double& x : q.data()) x = rng.next_normal();
  for (std::size_t j = 0; j < n; ++j) {
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t p = 0; p < j; ++p) {
        double proj = 0.0;
        for (std::size_t i = 0; i < n; ++i) proj += q(i, p) * q(i, j);
        for (std::size_t i = 0; i < n; ++i) q(i, j) -= proj * q(i, p);
      }
    double nrm = 0.0;
    for (std::size_t i = 0; i < n; ++i) nrm += q(i, j) * q(i, j);
    nrm = std::sqrt(nrm);
    for (std::size_t i = 0; i < n; ++i) q(i, j) /= nrm;
  }
  return q;
}

}  // namespace pevcond
