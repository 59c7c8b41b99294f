#include "biorth/numerics/quadrature.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <sstream>

#include "biorth/errors.hpp"

namespace biorth::numerics {

IntegrationDomain IntegrationDomain::finite(Rational a, Rational b, bool singular_a, bool singular_b) {
  if (!(a < b)) throw Error(ErrorCode::InvalidArgument, "finite domain requires a < b");
  return IntegrationDomain(Kind::Finite, std::move(a), std::move(b), singular_a, singular_b);
}

IntegrationDomain IntegrationDomain::half_line(Rational a, bool singular_a) {
  return IntegrationDomain(Kind::HalfLine, std::move(a), Rational(0), singular_a, false);
}

IntegrationDomain IntegrationDomain::full_line() {
  return IntegrationDomain(Kind::FullLine, Rational(0), Rational(0), false, false);
}

bool IntegrationDomain::contains(const Real& x, const Real& tol) const {
  if (has_lower() && x < Real(a_) - tol) return false;
  if (has_upper() && x > Real(b_) + tol) return false;
  return true;
}

std::string IntegrationDomain::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Finite: os << "[" << a_ << ", " << b_ << "]"; break;
    case Kind::HalfLine: os << "[" << a_ << ", inf)"; break;
    case Kind::FullLine: os << "(-inf, inf)"; break;
  }
  return os.str();
}

namespace {

constexpr int kMinLevel = 3;
constexpr int kMaxLevel = 12;
constexpr int kMaxDoublings = 24;

struct Sampler {
  const VectorIntegrand& f;
  std::size_t m;
  std::vector<Real> buf;
  std::size_t evaluations = 0;

  Sampler(const VectorIntegrand& fn, std::size_t components) : f(fn), m(components), buf(components) {}

  /// False when some component is not finite.
  bool operator()(const Real& x) {
    for (auto& v : buf) mpfr_set_zero(v.raw(), 1);
    f(x, buf);
    ++evaluations;
    for (const auto& v : buf)
      if (!v.is_finite()) return false;
    return true;
  }
};

struct Sums {
  std::vector<Real> value;
  std::vector<Real> l1;
  explicit Sums(std::size_t m) : value(m, Real(0)), l1(m, Real(0)) {}

  Real scratch;

  void add(const Real& w, const std::vector<Real>& f) {
    for (std::size_t c = 0; c < f.size(); ++c) {
      mpfr_mul(scratch.raw(), w.raw(), f[c].raw(), MPFR_RNDN);
      mpfr_add(value[c].raw(), value[c].raw(), scratch.raw(), MPFR_RNDN);
      mpfr_abs(scratch.raw(), scratch.raw(), MPFR_RNDN);
      mpfr_add(l1[c].raw(), l1[c].raw(), scratch.raw(), MPFR_RNDN);
    }
  }
};

[[noreturn]] void non_finite(const Real& x) {
  throw Error(ErrorCode::NonFiniteSample, "integrand not finite at x = " + x.to_decimal(12));
}

bool converged(const std::vector<Real>& err, const std::vector<Real>& l1, const Real& tol) {
  for (std::size_t c = 0; c < err.size(); ++c)
    if (err[c] > tol * l1[c]) return false;
  return true;
}

// Error estimate from the last three level values.  Both rules double the
// number of correct digits per halving, so with d1 = |S_k - S_{k-1}| and
// d2 = |S_k - S_{k-2}| the error of S_k is about d1^2 / d2; never more
// than d1, and never below rounding in the accumulated |f| sum.
VectorQuadResult finish(const Sums& s, const Real& h, const std::vector<Real>& prev,
                        const std::vector<Real>& prev2, std::size_t evals) {
  VectorQuadResult r;
  r.evaluations = evals;
  const Real eps = pow2(-(working_bits() - 8));
  for (std::size_t c = 0; c < s.value.size(); ++c) {
    r.value.push_back(h * s.value[c]);
    r.l1.push_back(h * s.l1[c]);
    const Real d1 = abs(r.value.back() - prev[c]);
    const Real d2 = abs(r.value.back() - prev2[c]);
    Real e = d1;
    if (d1 < d2) e = d1 * d1 / d2;
    r.error.push_back(max(e, eps * r.l1.back()));
  }
  return r;
}

// Unit-interval tanh-sinh nodes t = k 2^-level (odd k above level 0):
// distance to the nearer endpoint delta = 1/(1 + e^{2u}) and weight
// (pi/4) cosh t / cosh^2 u, u = (pi/2) sinh t.  Cached per precision since
// nested integrals revisit the same levels many times.
struct TsNode {
  Real delta;
  Real weight;
  bool centre;
};

double ts_t_max(long bits) {
  // Beyond t_max the weights fall below 2^(-2 bits).
  return std::asinh((2.0 / M_PI) * (2.0 * static_cast<double>(bits) + 10.0) * std::log(2.0) / 2.0) + 0.5;
}

const std::vector<TsNode>& ts_level(long bits, int level) {
  thread_local std::map<std::pair<long, int>, std::vector<TsNode>> cache;
  auto [it, fresh] = cache.try_emplace({bits, level});
  if (!fresh) return it->second;
  PrecisionScope scope(bits);
  const double t_max = ts_t_max(bits);
  const Real half_pi = pi() / 2;
  auto node = [&](const Real& t) {
    const Real u = half_pi * sinh(t);
    const Real ch = cosh(u);
    return TsNode{1 / (1 + exp(2 * u)), half_pi * cosh(t) / (2 * ch * ch), t.is_zero()};
  };
  if (level == 0) {
    for (long k = 0; static_cast<double>(k) <= t_max; ++k) it->second.push_back(node(Real(k)));
  } else {
    const long steps = static_cast<long>(t_max * std::ldexp(1.0, level));
    for (long k = 1; k <= steps; k += 2) it->second.push_back(node(ldexp(Real(k), -level)));
  }
  return it->second;
}

// Tanh-sinh on [a, b] with nested step halving.  Nodes are placed by their
// distance to the nearer endpoint so that no cancellation occurs there.
VectorQuadResult tanh_sinh(Sampler& sample, const Real& a, const Real& b, bool singular_a, bool singular_b,
                           const PrecisionCtx& ctx) {
  const Real len = b - a;
  Sums sums(sample.m);
  std::vector<Real> prev(sample.m, Real(0));
  Real w, x;

  auto add_level = [&](int level) {
    for (const auto& nd : ts_level(ctx.bits(), level)) {
      mpfr_mul(w.raw(), len.raw(), nd.weight.raw(), MPFR_RNDN);
      if (nd.centre) {
        x = a + len / 2;
        if (!sample(x)) non_finite(x);
        sums.add(w, sample.buf);
        continue;
      }
      mpfr_mul(x.raw(), len.raw(), nd.delta.raw(), MPFR_RNDN);
      mpfr_sub(x.raw(), b.raw(), x.raw(), MPFR_RNDN);
      if (sample(x)) {
        sums.add(w, sample.buf);
      } else if (!singular_b) {
        non_finite(x);
      }
      mpfr_mul(x.raw(), len.raw(), nd.delta.raw(), MPFR_RNDN);
      mpfr_add(x.raw(), a.raw(), x.raw(), MPFR_RNDN);
      if (sample(x)) {
        sums.add(w, sample.buf);
      } else if (!singular_a) {
        non_finite(x);
      }
    }
  };

  add_level(0);
  Real h(1);
  std::vector<Real> current(sample.m);
  for (std::size_t c = 0; c < sample.m; ++c) current[c] = sums.value[c];

  std::vector<Real> prev2;
  for (int level = 1; level <= kMaxLevel; ++level) {
    prev2 = prev;
    prev = current;
    h = pow2(-level);
    add_level(level);
    for (std::size_t c = 0; c < sample.m; ++c) current[c] = h * sums.value[c];
    if (level >= kMinLevel) {
      auto r = finish(sums, h, prev, prev2, sample.evaluations);
      if (converged(r.error, r.l1, ctx.quad_rel_tol())) return r;
    }
  }
  throw Error(ErrorCode::NonConvergence, "tanh-sinh did not converge on [" + a.to_decimal(8) + ", " + b.to_decimal(8) + "]");
}

// Smallest power-of-two distance T from origin (in direction dir) at which
// every component has decayed below tol relative to its peak on [0, T].
Real find_cut(Sampler& sample, const Real& origin, int dir, std::vector<Real>& peak, const Real& tol) {
  Real t(1);
  for (int k = 0; k < kMaxDoublings; ++k, t *= 2) {
    for (int j = 1; j <= 16; ++j) {
      const Real x = origin + dir * t * Real(j) / 16;
      if (!sample(x)) continue;
      for (std::size_t c = 0; c < sample.m; ++c) peak[c] = max(peak[c], abs(sample.buf[c]));
    }
    bool decayed = true;
    for (double s : {1.0, 1.25, 1.5, 2.0}) {
      const Real x = origin + dir * t * Real(s);
      if (!sample(x)) non_finite(x);
      for (std::size_t c = 0; c < sample.m && decayed; ++c)
        if (abs(sample.buf[c]) * 16 > tol * peak[c]) decayed = false;
    }
    if (decayed) return t;
  }
  throw Error(ErrorCode::NonConvergence, "integrand shows no decay toward infinity");
}

VectorQuadResult trapezoid_line(Sampler& sample, const Real& lo, const Real& hi, const PrecisionCtx& ctx,
                                Real& step_out, Sums& sums) {
  const Real h0 = max(-lo, hi) / 8;
  std::vector<Real> prev(sample.m, Real(0)), current(sample.m, Real(0));
  auto add_range = [&](const Real& h, bool odd_only) {
    const long kmin = static_cast<long>(std::ceil((lo / h).to_double()));
    const long kmax = static_cast<long>(std::floor((hi / h).to_double()));
    for (long k = kmin; k <= kmax; ++k) {
      if (odd_only && k % 2 == 0) continue;
      const Real x = h * Real(k);
      if (!sample(x)) non_finite(x);
      sums.add(Real(1), sample.buf);
    }
  };
  add_range(h0, false);
  for (std::size_t c = 0; c < sample.m; ++c) current[c] = h0 * sums.value[c];
  std::vector<Real> prev2;
  for (int level = 1; level <= kMaxLevel + 4; ++level) {
    prev2 = prev;
    prev = current;
    const Real h = ldexp(h0, -level);
    add_range(h, true);
    for (std::size_t c = 0; c < sample.m; ++c) current[c] = h * sums.value[c];
    if (level >= kMinLevel) {
      auto r = finish(sums, h, prev, prev2, sample.evaluations);
      if (converged(r.error, r.l1, ctx.quad_rel_tol())) {
        step_out = h;
        return r;
      }
    }
  }
  throw Error(ErrorCode::NonConvergence, "trapezoid panels did not converge on the truncated line");
}

VectorQuadResult integrate_full_line(Sampler& sample, const PrecisionCtx& ctx) {
  std::vector<Real> peak(sample.m, Real(0));
  Real right = find_cut(sample, Real(0), +1, peak, ctx.quad_rel_tol());
  Real left = find_cut(sample, Real(0), -1, peak, ctx.quad_rel_tol());
  for (int k = 0; k < kMaxDoublings; ++k) {
    Sums sums(sample.m);
    Real h;
    auto r = trapezoid_line(sample, -left, right, ctx, h, sums);
    // Panel beyond each cut, at the converged step.
    Sums tail(sample.m);
    for (int side : {-1, +1}) {
      const Real cut = side > 0 ? right : left;
      const long kmin = static_cast<long>(std::floor((cut / h).to_double())) + 1;
      const long kmax = static_cast<long>(std::floor((2 * cut / h).to_double()));
      for (long j = kmin; j <= kmax; ++j) {
        const Real x = side * h * Real(j);
        if (!sample(x)) non_finite(x);
        tail.add(h, sample.buf);
      }
    }
    if (converged(tail.l1, r.l1, ctx.quad_rel_tol())) {
      for (std::size_t c = 0; c < sample.m; ++c) {
        r.value[c] += tail.value[c];
        r.l1[c] += tail.l1[c];
        r.error[c] += tail.l1[c];
      }
      r.evaluations = sample.evaluations;
      return r;
    }
    left *= 2;
    right *= 2;
  }
  throw Error(ErrorCode::NonConvergence, "tail beyond truncation never fell below tolerance");
}

VectorQuadResult integrate_half_line(Sampler& sample, const Real& a, bool singular_a, const PrecisionCtx& ctx) {
  std::vector<Real> peak(sample.m, Real(0));
  Real cut = find_cut(sample, a, +1, peak, ctx.quad_rel_tol());
  for (int k = 0; k < kMaxDoublings; ++k) {
    auto r = tanh_sinh(sample, a, a + cut, singular_a, false, ctx);
    // The beyond-cut panel only has to be resolved to the absolute level of r.
    const PrecisionCtx loose = ctx.with_quad_tol(Real(1) / 1024);
    auto tail = tanh_sinh(sample, a + cut, a + 2 * cut, false, false, loose);
    if (converged(tail.l1, r.l1, ctx.quad_rel_tol())) {
      for (std::size_t c = 0; c < sample.m; ++c) {
        r.value[c] += tail.value[c];
        r.l1[c] += tail.l1[c];
        r.error[c] += tail.l1[c] / 1024;
      }
      r.evaluations = sample.evaluations;
      return r;
    }
    cut *= 2;
  }
  throw Error(ErrorCode::NonConvergence, "tail beyond truncation never fell below tolerance");
}

}  // namespace

VectorQuadResult integrate(const VectorIntegrand& f, std::size_t components, const IntegrationDomain& domain,
                           const PrecisionCtx& ctx) {
  PrecisionScope scope(ctx.bits());
  Sampler sample(f, components);
  switch (domain.kind()) {
    case IntegrationDomain::Kind::Finite:
      return tanh_sinh(sample, Real(domain.lower()), Real(domain.upper()), domain.singular_lower(),
                       domain.singular_upper(), ctx);
    case IntegrationDomain::Kind::HalfLine:
      return integrate_half_line(sample, Real(domain.lower()), domain.singular_lower(), ctx);
    case IntegrationDomain::Kind::FullLine:
      return integrate_full_line(sample, ctx);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown domain kind");
}

QuadResult integrate(const ScalarIntegrand& f, const IntegrationDomain& domain, const PrecisionCtx& ctx) {
  VectorIntegrand vf = [&f](const Real& x, std::vector<Real>& out) { out[0] = f(x); };
  auto r = integrate(vf, 1, domain, ctx);
  return QuadResult{std::move(r.value[0]), std::move(r.error[0]), std::move(r.l1[0]), r.evaluations};
}

}  // namespace biorth::numerics
