#include "biorth/zeros/zeros.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "biorth/errors.hpp"
#include "biorth/kernels/evaluator.hpp"
#include "biorth/numerics/roots.hpp"

namespace biorth::zeros {

using nlohmann::json;
using numerics::Coeffs;

std::string_view to_string(Interlacing v) noexcept {
  switch (v) {
    case Interlacing::Yes:
      return "yes";
    case Interlacing::No:
      return "no";
    case Interlacing::NotApplicable:
      return "not_applicable";
  }
  return "?";
}

std::size_t ZeroReport::real_count() const {
  return static_cast<std::size_t>(std::count_if(flags.begin(), flags.end(), [](const RootFlags& f) { return f.is_real; }));
}

namespace {

Real tolerance(long bits) { return pow2(-bits / 4); }

ZeroReport classify_at(const system::MonicPolynomial& poly, const IntegrationDomain& support,
                       const PrecisionCtx& ctx) {
  PrecisionScope scope(ctx.bits());
  ZeroReport r;
  r.degree = poly.degree();
  r.bits = ctx.bits();
  r.roots = poly.exact ? numerics::poly_roots(*poly.exact, ctx) : numerics::poly_roots(poly.real, ctx);

  const Real tol = tolerance(ctx.bits());
  Real biggest(0);
  for (const auto& z : r.roots) biggest = max(biggest, abs(z));
  const Real imag_tol = tol * ctx.root_imag_tol_scale();
  const Real sep = tol * ctx.root_sep_tol_scale() * (1 + biggest);

  const std::size_t n = r.roots.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  bool simple = true;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (abs(r.roots[a] - r.roots[b]) <= sep) {
        parent[find(b)] = find(a);
        simple = false;
      }
    }
  }
  // Cluster ids numbered by first appearance in the sorted root list.
  std::vector<std::size_t> ids(n, n);
  std::size_t next = 0;
  bool all_real = true, all_in = true;
  for (std::size_t a = 0; a < n; ++a) {
    const auto& z = r.roots[a];
    RootFlags f;
    f.is_real = abs(z.im) <= imag_tol * (1 + abs(z));
    f.in_support = f.is_real && support.contains(z.re, tol * (1 + abs(z)));
    const std::size_t root = find(a);
    if (ids[root] == n) ids[root] = next++;
    f.cluster = ids[root];
    all_real = all_real && f.is_real;
    all_in = all_in && f.in_support;
    r.flags.push_back(f);
  }
  r.all_real_simple = all_real && simple;
  r.all_in_support = all_in;
  return r;
}

struct ExactVerdict {
  long distinct_real;
  bool squarefree;
  long outside;
};

// Distinct real roots, gcd(p, p') = 1, and real roots outside the support.
ExactVerdict exact_verdict(const Coeffs<Rational>& p, const IntegrationDomain& support) {
  ExactVerdict v{numerics::count_distinct_real_roots(p), numerics::degree(numerics::gcd(p, numerics::derivative(p))) == 0,
                 0};
  const auto chain = numerics::sturm_chain(p);
  const long below_inf = numerics::sign_variations_at_infinity(chain, -1);
  const long above_inf = numerics::sign_variations_at_infinity(chain, +1);
  // Roots in (a, b] number V(a) - V(b).
  if (support.has_lower()) {
    const Rational& a = support.lower();
    v.outside += below_inf - numerics::sign_variations(chain, a) - (numerics::horner(p, a) == 0 ? 1 : 0);
  }
  if (support.has_upper()) {
    v.outside += numerics::sign_variations(chain, support.upper()) - above_inf;
  }
  return v;
}

}  // namespace

ZeroReport classify_zeros(const system::MonicPolynomial& poly, const IntegrationDomain& support,
                          const PrecisionCtx& ctx) {
  if (poly.degree() < 1) throw Error(ErrorCode::InvalidArgument, "zero classification needs degree >= 1");
  std::optional<ExactVerdict> exact;
  if (poly.exact) exact = exact_verdict(*poly.exact, support);

  PrecisionCtx c = ctx;
  std::optional<ZeroReport> last;
  for (int attempt = 0; attempt <= 3; ++attempt, c = c.doubled()) {
    try {
      last = classify_at(poly, support, c);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::IterationStall || attempt == 3) throw;
      continue;
    }
    if (!exact) return *last;
    const bool agrees = last->all_real_simple == (exact->squarefree && exact->distinct_real == static_cast<long>(poly.degree())) &&
                        (!exact->squarefree || static_cast<long>(last->real_count()) == exact->distinct_real);
    if (agrees) break;
  }
  if (!last) throw Error(ErrorCode::IterationStall, "root finding failed at every precision");
  ZeroReport r = std::move(*last);
  if (exact) {
    r.certified = true;
    r.exact_real_count = exact->distinct_real;
    r.all_real_simple = exact->squarefree && exact->distinct_real == static_cast<long>(poly.degree());
    r.all_in_support = r.all_real_simple && exact->outside == 0;
  }
  return r;
}

Interlacing interlaces(const ZeroReport& lower, const ZeroReport& upper, const PrecisionCtx& ctx) {
  if (lower.degree == 0 || upper.degree != lower.degree + 1) return Interlacing::NotApplicable;
  if (!lower.all_real_simple || !upper.all_real_simple) return Interlacing::NotApplicable;
  PrecisionScope scope(std::max(ctx.bits(), std::max(lower.bits, upper.bits)));
  std::vector<Real> lo, up;
  Real biggest(0);
  for (const auto& z : lower.roots) {
    lo.push_back(z.re);
    biggest = max(biggest, abs(z.re));
  }
  for (const auto& z : upper.roots) {
    up.push_back(z.re);
    biggest = max(biggest, abs(z.re));
  }
  std::sort(lo.begin(), lo.end());
  std::sort(up.begin(), up.end());
  const Real sep = tolerance(ctx.bits()) * ctx.root_sep_tol_scale() * (1 + biggest);
  for (std::size_t k = 0; k < lo.size(); ++k) {
    if (!(up[k] + sep < lo[k] && lo[k] < up[k + 1] - sep)) return Interlacing::No;
  }
  return Interlacing::Yes;
}

std::vector<ZeroReport> zero_reports(const system::BiorthSystem& s, system::Side side, const PrecisionCtx& ctx) {
  const auto ev = kernels::make_evaluator(s.spec);
  const auto& support = side == system::Side::Left ? ev.x_support() : ev.y_support();
  const auto& polys = side == system::Side::Left ? s.p : s.q;
  const PrecisionCtx c = ctx.bits() >= s.bits ? ctx : PrecisionCtx(s.bits);
  std::vector<ZeroReport> out;
  for (std::size_t j = 1; j < polys.size(); ++j) {
    out.push_back(classify_zeros(polys[j], support, c));
    if (j >= 2) out.back().interlaces_with_previous = interlaces(out[out.size() - 2], out.back(), c);
  }
  return out;
}

std::vector<Interlacing> interlacing_report(const system::BiorthSystem& s, system::Side side,
                                            const PrecisionCtx& ctx) {
  std::vector<Interlacing> out;
  for (const auto& r : zero_reports(s, side, ctx)) out.push_back(r.interlaces_with_previous);
  return out;
}

json to_json(const ZeroReport& r) {
  PrecisionScope scope(r.bits);
  json roots = json::array();
  for (std::size_t k = 0; k < r.roots.size(); ++k) {
    const auto& z = r.roots[k];
    const auto& f = r.flags[k];
    roots.push_back(json{{"re", z.re.to_hex()},
                         {"im", z.im.to_hex()},
                         {"re_approx", z.re.to_decimal(20)},
                         {"im_approx", z.im.to_decimal(20)},
                         {"is_real", f.is_real},
                         {"in_support", f.in_support},
                         {"cluster", f.cluster}});
  }
  json out{{"degree", r.degree},
           {"bits", r.bits},
           {"roots", roots},
           {"verdict", {{"all_real_simple", r.all_real_simple}, {"all_in_support", r.all_in_support}}},
           {"certified", r.certified},
           {"interlaces_with_previous", std::string(to_string(r.interlaces_with_previous))}};
  if (r.exact_real_count) out["exact_real_count"] = *r.exact_real_count;
  return out;
}

std::string to_csv(const std::vector<ZeroReport>& reports) {
  std::ostringstream os;
  os << "degree,re,im,is_real,in_support\n";
  for (const auto& r : reports) {
    PrecisionScope scope(r.bits);
    for (std::size_t k = 0; k < r.roots.size(); ++k) {
      os << r.degree << ',' << r.roots[k].re.to_decimal(20) << ',' << r.roots[k].im.to_decimal(20) << ','
         << (r.flags[k].is_real ? 1 : 0) << ',' << (r.flags[k].in_support ? 1 : 0) << '\n';
    }
  }
  return os.str();
}

}  // namespace biorth::zeros
