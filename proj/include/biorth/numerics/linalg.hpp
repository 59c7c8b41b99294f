#pragma once

#include <optional>
#include <vector>

#include "biorth/numerics/matrix.hpp"
#include "biorth/numerics/precision.hpp"
#include "biorth/numerics/real.hpp"

namespace biorth::numerics {

struct RationalDetSolve {
  Rational determinant;
  std::optional<std::vector<Rational>> solution;
};

struct RealDetSolve {
  Real determinant;
  std::optional<std::vector<Real>> solution;
  /// max |U_ij| / max |A_ij| over the elimination.
  Real growth_factor;
  /// ||Ax - b||_inf when a right-hand side was supplied.
  std::optional<Real> residual;
};

/// Exact determinant by fraction-free (Bareiss) elimination; optional exact solve.
/// Throws Error(SingularMatrix) when the determinant is zero.
RationalDetSolve det_and_solve(const Matrix<Rational>& a, const std::vector<Rational>* b = nullptr);

/// Full-pivot elimination at ctx.bits().  Throws Error(SingularMatrix) when
/// the smallest pivot falls below 2^(16-bits) max |A_ij|, or when the solve
/// residual exceeds 2^(-bits/2) ||A|| ||x||.
RealDetSolve det_and_solve(const Matrix<Real>& a, const std::vector<Real>* b, const PrecisionCtx& ctx);

/// Full-pivot determinant plus the smallest pivot over max |A_ij|, the
/// rank-revealing measure of numerical singularity.
struct PivotedDet {
  Real determinant;
  Real min_pivot_ratio;
};
PivotedDet pivoted_determinant(const Matrix<Real>& a, const PrecisionCtx& ctx);

/// Determinant that returns zero instead of throwing for singular input.
Rational determinant(const Matrix<Rational>& a);
Integer determinant(const Matrix<Integer>& a);
Real determinant(const Matrix<Real>& a, const PrecisionCtx& ctx);

/// Inverse of a nonsingular rational matrix.
Matrix<Rational> inverse(const Matrix<Rational>& a);

/// Hilbert matrix H_ij = 1/(i+j+1).
Matrix<Rational> hilbert(std::size_t n);

Matrix<Real> to_real(const Matrix<Rational>& a);

}  // namespace biorth::numerics
