#pragma once

#include <vector>

#include "biorth/numerics/polynomial.hpp"
#include "biorth/numerics/precision.hpp"
#include "biorth/numerics/real.hpp"

namespace biorth::numerics {

/// All deg(p) complex roots (with multiplicity) of a real polynomial,
/// refined simultaneously by Aberth-Ehrlich iteration at ctx.bits().
///
/// Each returned root satisfies |p(z)| <= 2^(32-bits) * sum_k |a_k||z|^k.
/// Non-real roots come back as exact conjugate pairs; real roots have a
/// zero imaginary part.  Output is sorted by (re, im).
///
/// Throws Error(IterationStall) when the iteration fails to settle; callers
/// are expected to retry at doubled precision.
std::vector<Complex> poly_roots(const Coeffs<Real>& p, const PrecisionCtx& ctx);

/// Convenience for exact input: coefficients are rounded at ctx.bits().
std::vector<Complex> poly_roots(const Coeffs<Rational>& p, const PrecisionCtx& ctx);

/// Re-expands prod_k (x - z_k) into real coefficients (imaginary parts dropped).
Coeffs<Real> expand_roots(const std::vector<Complex>& roots);

}  // namespace biorth::numerics
