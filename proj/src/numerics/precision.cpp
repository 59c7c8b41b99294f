#include "biorth/numerics/precision.hpp"

#include <algorithm>
#include <string>

#include "biorth/errors.hpp"

namespace biorth::numerics {

namespace {

Real default_tol(long bits) {
  PrecisionScope scope(bits);
  return pow2(-bits / 2);
}

}  // namespace

PrecisionCtx::PrecisionCtx(long bits) : PrecisionCtx(bits, default_tol(bits)) {}

PrecisionCtx::PrecisionCtx(long bits, Real quad_rel_tol, double root_imag_tol_scale,
                           double root_sep_tol_scale)
    : bits_(bits),
      quad_rel_tol_(std::move(quad_rel_tol)),
      root_imag_tol_scale_(root_imag_tol_scale),
      root_sep_tol_scale_(root_sep_tol_scale) {
  if (bits_ < 64) throw Error(ErrorCode::InvalidArgument, "precision must be at least 64 bits, got " + std::to_string(bits_));
  if (!(quad_rel_tol_ > 0) || !(quad_rel_tol_ < 1)) {
    throw Error(ErrorCode::InvalidArgument, "quadrature tolerance must lie in (0, 1)");
  }
  for (double s : {root_imag_tol_scale_, root_sep_tol_scale_}) {
    if (!(s > 0.0 && s < 1.0)) throw Error(ErrorCode::InvalidArgument, "tolerance scales must lie in (0, 1)");
  }
}

PrecisionCtx PrecisionCtx::doubled() const {
  return PrecisionCtx(2 * bits_, default_tol(2 * bits_), root_imag_tol_scale_, root_sep_tol_scale_);
}

PrecisionCtx PrecisionCtx::for_moments(std::size_t n) const {
  const long want = std::max<long>({bits_, 256, 16 * static_cast<long>(n + 1)});
  if (want == bits_) return *this;
  return PrecisionCtx(want, default_tol(want), root_imag_tol_scale_, root_sep_tol_scale_);
}

PrecisionCtx PrecisionCtx::with_quad_tol(Real tol) const {
  return PrecisionCtx(bits_, std::move(tol), root_imag_tol_scale_, root_sep_tol_scale_);
}

}  // namespace biorth::numerics
