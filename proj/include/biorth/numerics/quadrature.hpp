#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "biorth/numerics/precision.hpp"
#include "biorth/numerics/real.hpp"

namespace biorth::numerics {

/// Integration range of one variable.  Endpoints are exact rationals.
class IntegrationDomain {
 public:
  enum class Kind { Finite, HalfLine, FullLine };

  /// [a, b]; requires a < b.
  static IntegrationDomain finite(Rational a, Rational b, bool singular_a = false, bool singular_b = false);
  /// [a, +inf).
  static IntegrationDomain half_line(Rational a, bool singular_a = false);
  /// (-inf, +inf).
  static IntegrationDomain full_line();

  Kind kind() const noexcept { return kind_; }
  const Rational& lower() const noexcept { return a_; }
  const Rational& upper() const noexcept { return b_; }
  bool has_lower() const noexcept { return kind_ != Kind::FullLine; }
  bool has_upper() const noexcept { return kind_ == Kind::Finite; }
  bool singular_lower() const noexcept { return singular_a_; }
  bool singular_upper() const noexcept { return singular_b_; }

  /// Closed-support membership with endpoints widened by tol.
  bool contains(const Real& x, const Real& tol) const;

  std::string describe() const;

  friend bool operator==(const IntegrationDomain&, const IntegrationDomain&) = default;

 private:
  IntegrationDomain(Kind k, Rational a, Rational b, bool sa, bool sb)
      : kind_(k), a_(std::move(a)), b_(std::move(b)), singular_a_(sa), singular_b_(sb) {}

  Kind kind_;
  Rational a_;
  Rational b_;
  bool singular_a_;
  bool singular_b_;
};

struct QuadResult {
  Real value;
  /// Estimate of |value - exact|.
  Real error;
  /// Quadrature of |f|; the scale convergence is measured against.
  Real l1;
  std::size_t evaluations = 0;
};

struct VectorQuadResult {
  std::vector<Real> value;
  std::vector<Real> error;
  std::vector<Real> l1;
  std::size_t evaluations = 0;
};

using ScalarIntegrand = std::function<Real(const Real&)>;
/// Writes `components` values for abscissa x into out (pre-sized).
using VectorIntegrand = std::function<void(const Real& x, std::vector<Real>& out)>;

/// Integrates f over the domain to relative accuracy ctx.quad_rel_tol().
///
/// Finite domains use the tanh-sinh transform (which also absorbs flagged
/// integrable endpoint singularities).  Half lines are truncated where the
/// integrand has decayed below tolerance, then handled as finite; the line
/// is truncated the same way on both sides and summed with step-halving
/// trapezoid panels, which converge geometrically for the analytic, rapidly
/// decaying integrands this library produces.  Truncation is accepted only
/// once the panel beyond the cut contributes below tolerance.
///
/// Converged means error <= quad_rel_tol * l1 for every component.
/// Throws Error(NonConvergence) or Error(NonFiniteSample).
QuadResult integrate(const ScalarIntegrand& f, const IntegrationDomain& domain, const PrecisionCtx& ctx);

VectorQuadResult integrate(const VectorIntegrand& f, std::size_t components, const IntegrationDomain& domain,
                           const PrecisionCtx& ctx);

}  // namespace biorth::numerics
