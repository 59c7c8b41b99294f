#pragma once

#include <cstddef>
#include <vector>

#include "biorth/kernels/spec.hpp"
#include "biorth/numerics/matrix.hpp"
#include "biorth/numerics/real.hpp"

namespace biorth::kernels {

/// prefactor * exp(-1/2 xi^T A xi - b^T xi - kappa), with A symmetric
/// positive definite and every parameter exact.  The prefactor collects the
/// Gaussian integrals over variables already eliminated:
/// (2 pi)^(eliminated/2) / sqrt(eliminated_det).
struct GaussianForm {
  numerics::Matrix<Rational> a;
  std::vector<Rational> b;
  Rational kappa = 0;
  long eliminated = 0;
  Rational eliminated_det = 1;

  std::size_t dim() const noexcept { return b.size(); }

  Real prefactor() const;
  Real operator()(const std::vector<Real>& xi) const;

  /// Integral over all of R^dim.
  Real total_mass() const;
  /// Exact part of log(total_mass) that is rational: 1/2 b^T A^-1 b - kappa.
  Rational log_exponent() const;
  /// Mean -A^{-1} b and covariance A^{-1} of the normalized density.
  std::vector<Rational> mean() const;
  numerics::Matrix<Rational> covariance() const;
};

/// True when every leading principal minor is positive.
bool positive_definite(const numerics::Matrix<Rational>& a);

/// The chain exponent as a single quadratic form in (xi_1, ..., xi_p).
/// Endpoint variables receive half of their potential's quadratic
/// coefficient doubled into A (A_kk = V_k''/2 at the ends, V_k'' inside);
/// off-diagonals are the couplings.
/// Throws Error(InvalidSpec) unless every potential is quadratic and
/// Error(NotPositiveDefinite) when A is not positive definite.
GaussianForm chain_reduce(const Chain& chain);

/// Integrates out every variable not listed in keep (order of keep is kept).
GaussianForm marginalize(const GaussianForm& form, const std::vector<std::size_t>& keep);

/// Closed form of the convolved chain kernel in (xi_1, xi_p).
GaussianForm endpoint_form(const Chain& chain);

}  // namespace biorth::kernels
