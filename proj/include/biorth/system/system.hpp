#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "biorth/kernels/spec.hpp"
#include "biorth/moments/moments.hpp"
#include "biorth/numerics/polynomial.hpp"
#include "biorth/numerics/precision.hpp"
#include "biorth/numerics/real.hpp"

namespace biorth::system {

using numerics::Coeffs;
using numerics::PrecisionCtx;

/// Which family: p_j (left, x variable) or q_j (right, y variable).
enum class Side { Left, Right };

std::string_view to_string(Side side) noexcept;

/// Monic polynomial, coefficients ascending.  The real coefficients are
/// always present; the leading one is exactly 1 in both representations.
struct MonicPolynomial {
  std::optional<Coeffs<Rational>> exact;
  Coeffs<Real> real;

  static MonicPolynomial from_exact(Coeffs<Rational> c);
  /// Throws Error(InvalidArgument) unless the last coefficient is 1.
  static MonicPolynomial from_real(Coeffs<Real> c);

  std::size_t degree() const noexcept { return real.size() - 1; }
  bool is_exact() const noexcept { return exact.has_value(); }
  Real operator()(const Real& x) const;
};

/// The monic pairs p_j, q_j (j = 0..degree) with
///   int p_j(x) w(x, y) q_k(y) dx dy = h_j delta_jk.
/// On exact paths h_j = scale * h_exact[j] (scale = 1 for the Exact path).
struct BiorthSystem {
  kernels::WeightSpec spec = kernels::CauchyExp{};
  std::size_t degree = 0;
  long bits = 0;
  moments::MomentMatrix moments;
  std::vector<MonicPolynomial> p;
  std::vector<MonicPolynomial> q;
  std::optional<std::vector<Rational>> h_exact;
  std::vector<Real> h;
  /// max |sum p_j M q_k - h_j delta_jk|; exactly 0 on exact paths.
  Real residual;

  bool exact() const noexcept { return h_exact.has_value(); }
};

/// Per-degree linear solves against the moment matrix.  For symmetric
/// kernels on the real path q_j is set to p_j.
/// Throws GramSingularError(k) at the first vanishing leading minor D_k.
BiorthSystem build_system(const kernels::WeightSpec& spec, std::size_t degree, const PrecisionCtx& ctx,
                          const moments::MomentOptions& options = {});
BiorthSystem build_system(const kernels::WeightSpec& spec, const moments::MomentMatrix& m, const PrecisionCtx& ctx);

/// p_n from the bordered determinant with last column (1, x, ..., x^n),
/// divided by D_{n-1}.  Throws GramSingularError when D_{n-1} = 0.
MonicPolynomial determinant_formula_poly(const moments::MomentMatrix& m, std::size_t n, const PrecisionCtx& ctx);
MonicPolynomial determinant_formula_poly(const kernels::WeightSpec& spec, std::size_t n, const PrecisionCtx& ctx,
                                         const moments::MomentOptions& options = {});

/// Largest coefficientwise |a_k - b_k| (the degrees must agree).
Real coefficient_distance(const MonicPolynomial& a, const MonicPolynomial& b);
/// True when both are exact and equal, or both real and within tol.
bool same_polynomial(const MonicPolynomial& a, const MonicPolynomial& b, const Real& tol);

struct IntegralRepCheck {
  bool ok = false;
  MonicPolynomial p1;
  MonicPolynomial expected;
  Real residual;
};

/// p_1(x) = x - M_10 / M_00.
IntegralRepCheck integral_rep_check_n1(const kernels::WeightSpec& spec, const PrecisionCtx& ctx);

struct DeterminantCrossCheck {
  /// p_n from the minor expansion equals the solved p_n for every n <= degree
  /// (exactly on rational paths, within 2^(-bits/2) relative otherwise).
  bool polys_agree = false;
  /// h_j = D_j / D_{j-1} with D_{-1} = 1, under the same tolerance rule.
  bool norms_agree = false;
  Real max_coeff_distance;
  Real max_norm_error;
};

DeterminantCrossCheck determinant_cross_check(const BiorthSystem& s, const PrecisionCtx& ctx);

/// Rationals as {"num","den"}, reals as hex-float strings.
nlohmann::json rational_json(const Rational& q);
nlohmann::json coeffs_json(const MonicPolynomial& p);
/// {degree, path, p, q, h, residual}.
nlohmann::json to_json(const BiorthSystem& s);

}  // namespace biorth::system
