#include "biorth/system/system.hpp"

#include <string>

#include "biorth/errors.hpp"
#include "biorth/numerics/linalg.hpp"

namespace biorth::system {

using moments::MomentMatrix;
using nlohmann::json;
using numerics::Matrix;

MonicPolynomial MonicPolynomial::from_exact(Coeffs<Rational> c) {
  if (c.empty() || c.back() != 1) throw Error(ErrorCode::InvalidArgument, "polynomial is not monic");
  MonicPolynomial p;
  p.real.reserve(c.size());
  for (const auto& v : c) p.real.emplace_back(v);
  p.exact = std::move(c);
  return p;
}

MonicPolynomial MonicPolynomial::from_real(Coeffs<Real> c) {
  if (c.empty() || !(c.back() == Real(1))) throw Error(ErrorCode::InvalidArgument, "polynomial is not monic");
  MonicPolynomial p;
  p.real = std::move(c);
  return p;
}

Real MonicPolynomial::operator()(const Real& x) const { return numerics::horner(real, x); }

namespace {

[[noreturn]] void gram_singular(std::size_t k, long real_bits = 0) {
  std::string what = "leading moment minor D_" + std::to_string(k);
  if (real_bits > 0) {
    what += " is numerically zero at " + std::to_string(real_bits) + " bits";
  } else {
    what += " vanishes";
  }
  throw GramSingularError(k, what + "; no monic bi-orthogonal pair of degree " + std::to_string(k + 1));
}

// Coefficients a_0..a_{j-1} of the degree-j member, a_j = 1:
//   left  (p): sum_k a_k M(k, m) = -M(j, m), m < j
//   right (q): sum_k a_k M(m, k) = -M(m, j), m < j
template <class T>
Matrix<T> degree_system(const Matrix<T>& m, std::size_t j, bool left, std::vector<T>& rhs) {
  Matrix<T> a(j, j);
  rhs.assign(j, T(0));
  for (std::size_t r = 0; r < j; ++r) {
    for (std::size_t k = 0; k < j; ++k) a(r, k) = left ? m(k, r) : m(r, k);
    rhs[r] = -(left ? m(j, r) : m(r, j));
  }
  return a;
}

Coeffs<Rational> exact_member(const Matrix<Rational>& m, std::size_t j, bool left) {
  if (j == 0) return {Rational(1)};
  std::vector<Rational> rhs;
  const auto a = degree_system(m, j, left, rhs);
  Coeffs<Rational> c;
  try {
    c = *numerics::det_and_solve(a, &rhs).solution;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SingularMatrix) gram_singular(j - 1);
    throw;
  }
  c.emplace_back(1);
  return c;
}

Coeffs<Real> real_member(const Matrix<Real>& m, std::size_t j, bool left, const PrecisionCtx& ctx) {
  if (j == 0) return {Real(1)};
  std::vector<Real> rhs;
  const auto a = degree_system(m, j, left, rhs);
  Coeffs<Real> c;
  try {
    c = *numerics::det_and_solve(a, &rhs, ctx).solution;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SingularMatrix) gram_singular(j - 1, ctx.bits());
    throw;
  }
  c.emplace_back(1);
  return c;
}

template <class T>
T pairing(const Matrix<T>& m, const Coeffs<T>& p, const Coeffs<T>& q) {
  T acc(0);
  for (std::size_t a = 0; a < p.size(); ++a) {
    T row(0);
    for (std::size_t b = 0; b < q.size(); ++b) row += m(a, b) * q[b];
    acc += p[a] * row;
  }
  return acc;
}

PrecisionCtx at_least(const PrecisionCtx& ctx, long bits) { return ctx.bits() >= bits ? ctx : PrecisionCtx(bits); }

}  // namespace

BiorthSystem build_system(const kernels::WeightSpec& spec, std::size_t degree, const PrecisionCtx& ctx,
                          const moments::MomentOptions& options) {
  return build_system(spec, moments::moment_matrix(spec, degree, ctx, options), ctx);
}

BiorthSystem build_system(const kernels::WeightSpec& spec, const MomentMatrix& m, const PrecisionCtx& ctx) {
  const PrecisionCtx sctx = at_least(ctx, m.bits);
  PrecisionScope scope(sctx.bits());
  const auto gram = moments::gram_sequence(m, sctx);
  if (auto k = gram.first_singular()) gram_singular(*k, m.rational ? 0 : sctx.bits());

  BiorthSystem s;
  s.spec = spec;
  s.degree = m.n;
  s.bits = sctx.bits();
  s.moments = m;
  const std::size_t count = m.n + 1;

  if (m.rational) {
    const auto& r = *m.rational;
    const Real scale = m.scale ? *m.scale : Real(1);
    s.h_exact.emplace();
    Rational worst = 0;
    for (std::size_t j = 0; j < count; ++j) {
      s.p.push_back(MonicPolynomial::from_exact(exact_member(r, j, true)));
      s.q.push_back(MonicPolynomial::from_exact(exact_member(r, j, false)));
    }
    for (std::size_t j = 0; j < count; ++j) {
      s.h_exact->push_back(pairing(r, *s.p[j].exact, *s.q[j].exact));
      s.h.push_back(scale * Real(s.h_exact->back()));
    }
    for (std::size_t j = 0; j < count; ++j) {
      for (std::size_t k = 0; k < count; ++k) {
        Rational v = pairing(r, *s.p[j].exact, *s.q[k].exact);
        if (j == k) v -= (*s.h_exact)[j];
        if (abs(v) > worst) worst = abs(v);
      }
    }
    s.residual = scale * Real(worst);
    return s;
  }

  for (std::size_t j = 0; j < count; ++j) {
    s.p.push_back(MonicPolynomial::from_real(real_member(m.real, j, true, sctx)));
    s.q.push_back(m.symmetric_kernel ? s.p.back()
                                     : MonicPolynomial::from_real(real_member(m.real, j, false, sctx)));
  }
  for (std::size_t j = 0; j < count; ++j) s.h.push_back(pairing(m.real, s.p[j].real, s.q[j].real));
  Real worst(0);
  for (std::size_t j = 0; j < count; ++j) {
    for (std::size_t k = 0; k < count; ++k) {
      Real v = pairing(m.real, s.p[j].real, s.q[k].real);
      if (j == k) v -= s.h[j];
      worst = max(worst, abs(v));
    }
  }
  s.residual = worst;
  return s;
}

namespace {

// Rows 0..n of the first n columns, with row `skip` removed.
template <class T>
Matrix<T> cofactor_block(const Matrix<T>& m, std::size_t n, std::size_t skip) {
  Matrix<T> out(n, n);
  for (std::size_t r = 0, o = 0; r <= n; ++r) {
    if (r == skip) continue;
    for (std::size_t c = 0; c < n; ++c) out(o, c) = m(r, c);
    ++o;
  }
  return out;
}

}  // namespace

MonicPolynomial determinant_formula_poly(const MomentMatrix& m, std::size_t n, const PrecisionCtx& ctx) {
  if (n > m.n) throw Error(ErrorCode::InvalidArgument, "degree exceeds the moment matrix order");
  if (n == 0) {
    return m.rational ? MonicPolynomial::from_exact({Rational(1)}) : MonicPolynomial::from_real({Real(1)});
  }
  const PrecisionCtx sctx = at_least(ctx, m.bits);
  PrecisionScope scope(sctx.bits());
  if (m.rational) {
    const auto& r = *m.rational;
    const Rational d = numerics::determinant(r.leading(n));
    if (d == 0) gram_singular(n - 1);
    Coeffs<Rational> c(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      Rational minor = numerics::determinant(cofactor_block(r, n, i));
      c[i] = ((i + n) % 2 == 0 ? minor : Rational(-minor)) / d;
    }
    return MonicPolynomial::from_exact(std::move(c));
  }
  const Real d = numerics::determinant(m.real.leading(n), sctx);
  if (d.is_zero()) gram_singular(n - 1, sctx.bits());
  Coeffs<Real> c(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    Real minor = numerics::determinant(cofactor_block(m.real, n, i), sctx);
    c[i] = ((i + n) % 2 == 0 ? minor : -minor) / d;
  }
  // The x^n cofactor is D_{n-1} itself.
  c[n] = Real(1);
  return MonicPolynomial::from_real(std::move(c));
}

MonicPolynomial determinant_formula_poly(const kernels::WeightSpec& spec, std::size_t n, const PrecisionCtx& ctx,
                                         const moments::MomentOptions& options) {
  return determinant_formula_poly(moments::moment_matrix(spec, n, ctx, options), n, ctx);
}

Real coefficient_distance(const MonicPolynomial& a, const MonicPolynomial& b) {
  if (a.degree() != b.degree()) throw Error(ErrorCode::InvalidArgument, "polynomial degrees differ");
  Real worst(0);
  for (std::size_t k = 0; k < a.real.size(); ++k) worst = max(worst, abs(a.real[k] - b.real[k]));
  return worst;
}

bool same_polynomial(const MonicPolynomial& a, const MonicPolynomial& b, const Real& tol) {
  if (a.degree() != b.degree()) return false;
  if (a.exact && b.exact) return *a.exact == *b.exact;
  for (std::size_t k = 0; k < a.real.size(); ++k) {
    if (abs(a.real[k] - b.real[k]) > tol * (1 + abs(a.real[k]))) return false;
  }
  return true;
}

IntegralRepCheck integral_rep_check_n1(const kernels::WeightSpec& spec, const PrecisionCtx& ctx) {
  const auto s = build_system(spec, 1, ctx);
  PrecisionScope scope(s.bits);
  IntegralRepCheck out{false, s.p[1], s.p[1], Real(0)};
  const auto& m = s.moments;
  if (m.rational) {
    const Rational c0 = -(*m.rational)(1, 0) / (*m.rational)(0, 0);
    out.expected = MonicPolynomial::from_exact({c0, Rational(1)});
    out.residual = Real(abs(c0 - (*s.p[1].exact)[0]));
    out.ok = out.residual.is_zero();
    return out;
  }
  out.expected = MonicPolynomial::from_real({-(m.real(1, 0) / m.real(0, 0)), Real(1)});
  out.residual = coefficient_distance(out.expected, s.p[1]);
  out.ok = out.residual <= pow2(-s.bits / 2) * (1 + abs(out.expected.real[0]));
  return out;
}

DeterminantCrossCheck determinant_cross_check(const BiorthSystem& s, const PrecisionCtx& ctx) {
  const PrecisionCtx sctx = at_least(ctx, s.bits);
  PrecisionScope scope(sctx.bits());
  const Real tol = pow2(-sctx.bits() / 2);
  DeterminantCrossCheck out{true, true, Real(0), Real(0)};
  for (std::size_t n = 0; n <= s.degree; ++n) {
    const auto det_poly = determinant_formula_poly(s.moments, n, sctx);
    out.max_coeff_distance = max(out.max_coeff_distance, coefficient_distance(det_poly, s.p[n]));
    if (!same_polynomial(det_poly, s.p[n], tol)) out.polys_agree = false;
  }
  const auto gram = moments::gram_sequence(s.moments, sctx);
  for (std::size_t j = 0; j <= s.degree; ++j) {
    if (s.h_exact && gram.exact) {
      const Rational ratio = j == 0 ? (*gram.exact)[0] : Rational((*gram.exact)[j] / (*gram.exact)[j - 1]);
      if ((*s.h_exact)[j] != ratio) out.norms_agree = false;
      continue;
    }
    const Real ratio = j == 0 ? gram.d[0] : gram.d[j] / gram.d[j - 1];
    const Real err = abs(s.h[j] - ratio) / abs(ratio);
    out.max_norm_error = max(out.max_norm_error, err);
    if (err > tol) out.norms_agree = false;
  }
  return out;
}

json rational_json(const Rational& q) { return json{{"num", q.get_num().get_str()}, {"den", q.get_den().get_str()}}; }

json coeffs_json(const MonicPolynomial& p) {
  json arr = json::array();
  if (p.exact) {
    for (const auto& c : *p.exact) arr.push_back(rational_json(c));
  } else {
    for (const auto& c : p.real) arr.push_back(c.to_hex());
  }
  return arr;
}

json to_json(const BiorthSystem& s) {
  PrecisionScope scope(s.bits);
  json out;
  out["degree"] = s.degree;
  out["path"] = std::string(moments::to_string(s.moments.path));
  out["p"] = json::array();
  out["q"] = json::array();
  for (const auto& p : s.p) out["p"].push_back(coeffs_json(p));
  for (const auto& q : s.q) out["q"].push_back(coeffs_json(q));
  out["h"] = json::array();
  const bool plain = s.h_exact && !s.moments.scale;
  for (std::size_t j = 0; j < s.h.size(); ++j) {
    out["h"].push_back(plain ? rational_json((*s.h_exact)[j]) : json(s.h[j].to_hex()));
  }
  if (s.h_exact && s.moments.scale) {
    out["h_scale"] = s.moments.scale->to_hex();
    out["h_rational"] = json::array();
    for (const auto& v : *s.h_exact) out["h_rational"].push_back(rational_json(v));
  }
  out["residual"] = s.residual.to_hex();
  return out;
}

}  // namespace biorth::system
