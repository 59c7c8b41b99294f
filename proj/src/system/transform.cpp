#include "biorth/system/transform.hpp"

#include <algorithm>
#include <string>

#include "biorth/errors.hpp"
#include "biorth/kernels/gaussian.hpp"
#include "biorth/numerics/quadrature.hpp"

namespace biorth::system {

using numerics::IntegrationDomain;

std::string_view to_string(Side side) noexcept { return side == Side::Left ? "left" : "right"; }

std::string_view to_string(TransformRep rep) noexcept {
  switch (rep) {
    case TransformRep::Identity:
      return "identity";
    case TransformRep::PolynomialGaussian:
      return "polynomial_gaussian";
    case TransformRep::Quadrature:
      return "quadrature";
  }
  return "?";
}

std::string_view to_string(SignChangeReport::Method method) noexcept {
  return method == SignChangeReport::Method::ExactPolynomial ? "exact_polynomial" : "grid";
}

std::size_t chain_positions(const kernels::WeightSpec& spec) {
  if (auto ch = kernels::as_chain(spec)) return ch->length();
  return 2;
}

namespace {

// sum_k p_k E[(mu(x) + sigma Z)^k] for a standard normal Z, var = sigma^2.
template <class T>
Coeffs<T> gaussian_smear(const Coeffs<T>& p, const Coeffs<T>& mu, const T& var) {
  const std::size_t deg = p.size() - 1;
  std::vector<Coeffs<T>> mu_pow{{T(1)}};
  for (std::size_t k = 1; k <= deg; ++k) mu_pow.push_back(numerics::multiply(mu_pow.back(), mu));
  Coeffs<T> out{T(0)};
  for (std::size_t k = 0; k <= deg; ++k) {
    // C(k, m) (m-1)!! var^(m/2) for even m.
    T binom(1), dfact(1), vpow(1);
    for (std::size_t m = 0; m <= k; m += 2) {
      if (m > 0) {
        binom = binom * T(static_cast<long>((k - m + 2) * (k - m + 1))) / T(static_cast<long>(m * (m - 1)));
        dfact *= T(static_cast<long>(m - 1));
        vpow *= var;
      }
      out = numerics::add(out, numerics::scale(mu_pow[k - m], T(p[k] * binom * dfact * vpow)));
    }
  }
  numerics::trim(out);
  return out;
}

}  // namespace

TransformEvaluator transform(const BiorthSystem& system, Side side, std::size_t i, std::size_t j,
                             const PrecisionCtx& ctx) {
  if (j > system.degree) throw Error(ErrorCode::InvalidArgument, "transform degree exceeds the system degree");
  const std::size_t p = chain_positions(system.spec);
  if (i < 1 || i > p) {
    throw Error(ErrorCode::InvalidArgument, "chain position " + std::to_string(i) + " outside [1, " +
                                                std::to_string(p) + "]");
  }
  PrecisionScope scope(std::max(ctx.bits(), system.bits));
  const MonicPolynomial& poly = side == Side::Left ? system.p[j] : system.q[j];
  const auto chain = kernels::as_chain(system.spec);

  const bool identity = side == Side::Left ? i == 1 : i == p;
  if (identity) {
    const auto ev = kernels::make_evaluator(system.spec);
    TransformEvaluator out(side, i, j, TransformRep::Identity, side == Side::Left ? ev.x_support() : ev.y_support());
    out.factor_exact_ = poly.exact;
    out.factor_ = poly.real;
    return out;
  }
  if (!chain) {
    throw Error(ErrorCode::UnsupportedSpec, "kernel " + std::string(kernels::type_name(system.spec)) +
                                                " has no interior transforms; only the identity ones exist");
  }

  // The partial chain between the polynomial's variable and position i.
  const kernels::Chain part = side == Side::Left ? kernels::subchain(*chain, 0, i - 1)
                                                 : kernels::subchain(*chain, i - 1, chain->length() - 1);
  if (part.all_quadratic()) {
    const auto g = kernels::endpoint_form(part);
    // Integrated variable I, kept variable K.
    const std::size_t vi = side == Side::Left ? 0 : 1, vk = 1 - vi;
    const Rational& aii = g.a(vi, vi);
    const Rational& aik = g.a(vi, vk);
    const Rational& akk = g.a(vk, vk);
    const Rational& bi = g.b[vi];
    const Rational& bk = g.b[vk];
    TransformEvaluator out(side, i, j, TransformRep::PolynomialGaussian, IntegrationDomain::full_line());
    out.e2_ = -akk / 2 + aik * aik / (2 * aii);
    out.e1_ = -bk + aik * bi / aii;
    out.e0_ = -g.kappa + bi * bi / (2 * aii);
    out.log_constant_ = log(g.prefactor() * sqrt(2 * pi() / Real(aii)));
    const Coeffs<Rational> mu{Rational(-bi / aii), Rational(-aik / aii)};
    const Rational var = 1 / aii;
    if (poly.exact) {
      out.factor_exact_ = gaussian_smear(*poly.exact, mu, var);
      Coeffs<Real> r;
      for (const auto& c : *out.factor_exact_) r.emplace_back(c);
      out.factor_ = std::move(r);
    } else {
      out.factor_ = gaussian_smear(poly.real, Coeffs<Real>{Real(mu[0]), Real(mu[1])}, Real(var));
    }
    return out;
  }

  auto partial = std::make_shared<const kernels::KernelEvaluator>(kernels::make_evaluator(part));
  TransformEvaluator out(side, i, j, TransformRep::Quadrature, IntegrationDomain::full_line());
  out.partial_ = std::move(partial);
  out.poly_ = poly.real;
  return out;
}

Real TransformEvaluator::operator()(const Real& x, const PrecisionCtx& ctx) const {
  PrecisionScope scope(ctx.bits());
  switch (rep_) {
    case TransformRep::Identity:
      return numerics::horner(*factor_, x);
    case TransformRep::PolynomialGaussian: {
      const Real e = *log_constant_ + (Real(e2_) * x + Real(e1_)) * x + Real(e0_);
      return numerics::horner(*factor_, x) * exp(e);
    }
    case TransformRep::Quadrature: {
      const auto& ev = *partial_;
      const bool left = side_ == Side::Left;
      const auto r = numerics::integrate(
          [&](const Real& s) {
            return left ? numerics::horner(poly_, s) * ev(s, x, ctx) : ev(x, s, ctx) * numerics::horner(poly_, s);
          },
          left ? ev.x_support() : ev.y_support(), ctx);
      return r.value;
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown transform representation");
}

namespace {

using numerics::derivative;
using numerics::divmod;

Coeffs<Rational> monic(Coeffs<Rational> p) {
  numerics::trim(p);
  if (p.empty()) return p;
  const Rational lead = p.back();
  for (auto& c : p) c /= lead;
  return p;
}

// Yun's square-free factorization: p = lead * prod_k f_k^k.
std::vector<Coeffs<Rational>> squarefree_factors(const Coeffs<Rational>& p) {
  std::vector<Coeffs<Rational>> out;
  Coeffs<Rational> f = monic(p);
  if (numerics::degree(f) < 1) return out;
  const Coeffs<Rational> a0 = numerics::gcd(f, derivative(f));
  Coeffs<Rational> b = divmod(f, a0).first;
  Coeffs<Rational> c = divmod(derivative(f), a0).first;
  Coeffs<Rational> d = numerics::add(c, numerics::scale(derivative(b), Rational(-1)));
  numerics::trim(d);
  while (numerics::degree(b) >= 1) {
    Coeffs<Rational> a = numerics::gcd(b, d);
    out.push_back(a);
    b = divmod(b, a).first;
    c = divmod(d, a).first;
    d = numerics::add(c, numerics::scale(derivative(b), Rational(-1)));
    numerics::trim(d);
  }
  return out;
}

}  // namespace

std::vector<std::pair<Rational, Rational>> odd_real_roots(const Coeffs<Rational>& p, const Rational& width) {
  const auto factors = squarefree_factors(p);
  Coeffs<Rational> odd{Rational(1)};
  for (std::size_t k = 0; k < factors.size(); k += 2) odd = numerics::multiply(odd, factors[k]);
  std::vector<std::pair<Rational, Rational>> out;
  if (numerics::degree(odd) < 1) return out;

  const auto chain = numerics::sturm_chain(odd);
  auto v = [&](const Rational& x) { return numerics::sign_variations(chain, x); };
  // Roots in (a, b] number v(a) - v(b).
  std::vector<std::pair<Rational, Rational>> stack;
  const Rational bound = numerics::root_bound(odd);
  stack.emplace_back(-bound, bound);
  while (!stack.empty()) {
    auto [a, b] = stack.back();
    stack.pop_back();
    const int k = v(a) - v(b);
    if (k == 0) continue;
    if (k > 1) {
      const Rational mid = (a + b) / 2;
      stack.emplace_back(mid, b);
      stack.emplace_back(a, mid);
      continue;
    }
    while (b - a > width) {
      const Rational mid = (a + b) / 2;
      if (numerics::horner(odd, mid) == 0) {
        a = mid;
        b = mid;
        break;
      }
      if (v(a) - v(mid) == 1) {
        b = mid;
      } else {
        a = mid;
      }
    }
    out.emplace_back(a, b);
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  return out;
}

namespace {

struct Scan {
  const TransformEvaluator& ev;
  const PrecisionCtx& ctx;
  std::size_t budget;
  std::size_t used = 0;

  Real operator()(const Real& x) {
    if (++used > budget) {
      throw Error(ErrorCode::Inconclusive, "sign-change refinement budget exhausted near x = " + x.to_decimal(10));
    }
    return ev(x, ctx);
  }
};

std::pair<Real, Real> bisect(Scan& f, Real a, Real b, int sa, long bits) {
  const Real tol = pow2(-bits / 4);
  for (int it = 0; it < 200 && b - a > tol * (1 + max(abs(a), abs(b))); ++it) {
    const Real mid = (a + b) / 2;
    const int s = f(mid).sign();
    if (s == 0) return {mid, mid};
    if (s == sa) {
      a = mid;
    } else {
      b = mid;
    }
  }
  return {a, b};
}

}  // namespace

SignChangeReport sign_changes(const TransformEvaluator& ev, const PrecisionCtx& ctx) {
  PrecisionScope scope(ctx.bits());
  SignChangeReport rep;
  if (ev.factor()) {
    rep.method = SignChangeReport::Method::ExactPolynomial;
    Coeffs<Rational> p;
    if (ev.factor_exact()) {
      p = *ev.factor_exact();
    } else {
      // Binary floating coefficients are rationals; count on them exactly.
      for (const auto& c : *ev.factor()) p.push_back(c.to_rational());
    }
    const Rational width(Integer(1), Integer(Integer(1) << 40));
    for (const auto& [a, b] : odd_real_roots(p, width)) rep.brackets.emplace_back(Real(a), Real(b));
    rep.count = rep.brackets.size();
    return rep;
  }

  const std::size_t j = ev.degree();
  Scan f{ev, ctx, 4096 * (j + 1)};
  Real lo, hi;
  const auto& sup = ev.support();
  const std::size_t points = 64 * (j + 1) + 1;
  std::vector<Real> xs, fs;
  auto sample = [&](const Real& a, const Real& b) {
    xs.clear();
    fs.clear();
    for (std::size_t k = 0; k < points; ++k) {
      xs.push_back(a + (b - a) * Real(static_cast<long>(k)) / Real(static_cast<long>(points - 1)));
      fs.push_back(f(xs.back()));
    }
  };
  auto peak = [&] {
    Real m(0);
    for (const auto& v : fs) m = max(m, abs(v));
    return m;
  };
  if (sup.kind() == IntegrationDomain::Kind::Finite) {
    lo = Real(sup.lower());
    hi = Real(sup.upper());
    sample(lo, hi);
  } else {
    // Widen until the transform is negligible at both window edges.
    const Real base = sup.has_lower() ? Real(sup.lower()) : Real(0);
    Real r(4);
    const Real small = pow2(-ctx.bits() / 2);
    for (int k = 0;; ++k) {
      lo = sup.has_lower() ? base : -r;
      hi = base + r;
      sample(lo, hi);
      const Real m = peak();
      const bool edge_ok = abs(fs.back()) <= small * m && (sup.has_lower() || abs(fs.front()) <= small * m);
      if (edge_ok) break;
      if (k == 12) throw Error(ErrorCode::Inconclusive, "transform does not decay within |x| <= " + r.to_decimal(6));
      r *= 2;
    }
    rep.window = std::make_pair(lo, hi);
  }

  const Real m = peak();
  const Real touch = pow2(-ctx.bits() / 4) * m;
  int last_sign = 0;
  std::size_t last_k = 0;
  for (std::size_t k = 0; k < points; ++k) {
    const int s = fs[k].sign();
    if (s == 0) continue;
    if (last_sign != 0 && s != last_sign) rep.brackets.push_back(bisect(f, xs[last_k], xs[k], last_sign, ctx.bits()));
    last_sign = s;
    last_k = k;
  }
  // Small local minima of |f| may hide a pair of crossings.
  for (std::size_t k = 1; k + 1 < points; ++k) {
    const Real a0 = abs(fs[k]);
    if (!(a0 <= abs(fs[k - 1]) && a0 <= abs(fs[k + 1]))) continue;
    if (fs[k - 1].sign() != fs[k + 1].sign() || fs[k].sign() != fs[k - 1].sign() || a0 > m / 256) continue;
    const int s = fs[k - 1].sign();
    Real a = xs[k - 1], b = xs[k + 1];
    Real best = a0;
    bool crossed = false;
    for (int it = 0; it < 80 && !crossed; ++it) {
      const Real x1 = a + (b - a) / 3, x2 = b - (b - a) / 3;
      const Real f1 = f(x1), f2 = f(x2);
      if (f1.sign() != s || f2.sign() != s) {
        const Real& xc = f1.sign() != s ? x1 : x2;
        rep.brackets.push_back(bisect(f, xs[k - 1], xc, s, ctx.bits()));
        rep.brackets.push_back(bisect(f, xc, xs[k + 1], -s, ctx.bits()));
        crossed = true;
        break;
      }
      if (abs(f1) < abs(f2)) {
        b = x2;
      } else {
        a = x1;
      }
      best = min(best, min(abs(f1), abs(f2)));
    }
    if (!crossed && best <= touch) ++rep.touches;
  }
  std::sort(rep.brackets.begin(), rep.brackets.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  rep.count = rep.brackets.size();
  return rep;
}

}  // namespace biorth::system
