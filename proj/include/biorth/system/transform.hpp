#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "biorth/kernels/evaluator.hpp"
#include "biorth/system/system.hpp"

namespace biorth::system {

/// Left transforms smear p_j through the first factors of the chain,
/// right transforms smear q_j through the last ones:
///   P_{i,j}(x) = int p_j(s) (w_1 * ... * w_{i-1})(s, x) ds,  P_{1,j} = p_j
///   Q_{i,j}(x) = int (w_i * ... * w_{p-1})(x, s) q_j(s) ds,  Q_{p,j} = q_j
/// Representations:
///   Identity           the polynomial itself
///   PolynomialGaussian  factor(x) * exp(e2 x^2 + e1 x + e0) * constant (quadratic chains)
///   Quadrature          pointwise one-dimensional integral
enum class TransformRep { Identity, PolynomialGaussian, Quadrature };

std::string_view to_string(TransformRep rep) noexcept;

class TransformEvaluator {
 public:
  Side side() const noexcept { return side_; }
  /// Chain position i, 1-based.
  std::size_t index() const noexcept { return index_; }
  std::size_t degree() const noexcept { return degree_; }
  TransformRep rep() const noexcept { return rep_; }
  /// Range of the transform's variable.
  const numerics::IntegrationDomain& support() const noexcept { return support_; }

  /// The polynomial factor, for Identity and PolynomialGaussian.  Exact
  /// whenever the underlying p_j / q_j is.
  const std::optional<Coeffs<Rational>>& factor_exact() const noexcept { return factor_exact_; }
  const std::optional<Coeffs<Real>>& factor() const noexcept { return factor_; }

  Real operator()(const Real& x, const PrecisionCtx& ctx) const;

  friend TransformEvaluator transform(const BiorthSystem& system, Side side, std::size_t i, std::size_t j,
                                      const PrecisionCtx& ctx);

 private:
  TransformEvaluator(Side side, std::size_t i, std::size_t j, TransformRep rep, numerics::IntegrationDomain support)
      : side_(side), index_(i), degree_(j), rep_(rep), support_(std::move(support)) {}

  Side side_;
  std::size_t index_;
  std::size_t degree_;
  TransformRep rep_;
  numerics::IntegrationDomain support_;
  std::optional<Coeffs<Rational>> factor_exact_;
  std::optional<Coeffs<Real>> factor_;
  // PolynomialGaussian envelope, log(constant) + e2 x^2 + e1 x + e0.
  Rational e2_ = 0, e1_ = 0, e0_ = 0;
  std::optional<Real> log_constant_;
  // Quadrature: the partial chain and the polynomial integrated against it.
  std::shared_ptr<const kernels::KernelEvaluator> partial_;
  Coeffs<Real> poly_;
};

/// Chain specs (CoupledExp as p = 2) support 1 <= i <= p.  Other pointwise
/// kernels only have the identity transforms (left i = 1, right i = 2).
/// Throws Error(UnsupportedSpec) or Error(InvalidArgument).
TransformEvaluator transform(const BiorthSystem& system, Side side, std::size_t i, std::size_t j,
                             const PrecisionCtx& ctx);

/// Number of chain positions p (2 for non-chain kernels).
std::size_t chain_positions(const kernels::WeightSpec& spec);

struct SignChangeReport {
  enum class Method { ExactPolynomial, Grid };
  Method method = Method::Grid;
  /// Strict sign alternations (zeros of odd multiplicity).
  std::size_t count = 0;
  /// One bracket [a, b] with a sign change per counted zero, ascending.
  std::vector<std::pair<Real, Real>> brackets;
  /// Near-zero local minima of |f| without a crossing (even multiplicity).
  std::size_t touches = 0;
  /// Scanned interval on infinite supports.
  std::optional<std::pair<Real, Real>> window;
};

std::string_view to_string(SignChangeReport::Method method) noexcept;

/// Exact real-root count of the odd-multiplicity part of the polynomial
/// factor when one exists; otherwise an adaptive grid scan.
/// Throws Error(Inconclusive) when grid refinement runs out of budget.
SignChangeReport sign_changes(const TransformEvaluator& ev, const PrecisionCtx& ctx);

/// Distinct real roots of odd multiplicity of an exact polynomial, each
/// isolated to an interval of width <= width.
std::vector<std::pair<Rational, Rational>> odd_real_roots(const Coeffs<Rational>& p, const Rational& width);

}  // namespace biorth::system
