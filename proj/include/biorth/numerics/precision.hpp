#pragma once

#include "biorth/numerics/real.hpp"

namespace biorth::numerics {

/// Precision and tolerance settings threaded through every computation.
///
/// Invariants: bits >= 64; quad_rel_tol and both tolerance scales lie in (0, 1).
class PrecisionCtx {
 public:
  static constexpr long kDefaultBits = 256;

  /// quad_rel_tol defaults to 2^(-bits/2); both scales default to 1/2.
  explicit PrecisionCtx(long bits = kDefaultBits);
  PrecisionCtx(long bits, Real quad_rel_tol, double root_imag_tol_scale = 0.5,
               double root_sep_tol_scale = 0.5);

  long bits() const noexcept { return bits_; }
  const Real& quad_rel_tol() const noexcept { return quad_rel_tol_; }
  double root_imag_tol_scale() const noexcept { return root_imag_tol_scale_; }
  double root_sep_tol_scale() const noexcept { return root_sep_tol_scale_; }

  /// Same tolerance scheme at twice the precision.
  PrecisionCtx doubled() const;
  /// Context for Gram/moment work at order n: max(bits, 256, 16(n+1)) bits.
  PrecisionCtx for_moments(std::size_t n) const;
  /// Copy with a tighter (or looser) quadrature tolerance.
  PrecisionCtx with_quad_tol(Real tol) const;

 private:
  long bits_;
  Real quad_rel_tol_;
  double root_imag_tol_scale_;
  double root_sep_tol_scale_;
};

}  // namespace biorth::numerics
