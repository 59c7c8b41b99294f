#include "biorth/moments/moments.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <unordered_map>

#include "biorth/errors.hpp"
#include "biorth/kernels/evaluator.hpp"
#include "biorth/kernels/gaussian.hpp"
#include "biorth/moments/cache.hpp"
#include "biorth/numerics/linalg.hpp"
#include "biorth/numerics/polynomial.hpp"
#include "biorth/numerics/quadrature.hpp"

namespace biorth::moments {

using kernels::WeightSpec;
using numerics::Coeffs;
using numerics::IntegrationDomain;

std::string_view to_string(MomentPath path) noexcept {
  switch (path) {
    case MomentPath::Exact: return "exact";
    case MomentPath::ScaledExact: return "scaled_exact";
    case MomentPath::Series: return "series";
    case MomentPath::Quadrature: return "quadrature";
  }
  return "unknown";
}

std::optional<std::size_t> GramSequence::first_singular() const {
  for (std::size_t k = 0; k < singular.size(); ++k)
    if (singular[k]) return k;
  return std::nullopt;
}

Matrix<Rational> gaussian_moment_table(const std::vector<Rational>& mean, const Matrix<Rational>& cov, std::size_t n) {
  Matrix<Rational> m(n + 1, n + 1);
  m(0, 0) = 1;
  for (std::size_t j = 1; j <= n; ++j) {
    m(0, j) = mean[1] * m(0, j - 1);
    if (j >= 2) m(0, j) += Rational(static_cast<long>(j - 1)) * cov(1, 1) * m(0, j - 2);
  }
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 0; j <= n; ++j) {
      Rational v = mean[0] * m(i - 1, j);
      if (i >= 2) v += Rational(static_cast<long>(i - 1)) * cov(0, 0) * m(i - 2, j);
      if (j >= 1) v += Rational(static_cast<long>(j)) * cov(0, 1) * m(i - 1, j - 1);
      m(i, j) = std::move(v);
    }
  }
  return m;
}

namespace {

Rational factorial(std::size_t k) {
  Integer f = 1;
  for (std::size_t i = 2; i <= k; ++i) f *= static_cast<unsigned long>(i);
  return Rational(f);
}

Rational ipow(const Rational& x, std::size_t k) {
  Rational r = 1;
  for (std::size_t i = 0; i < k; ++i) r *= x;
  return r;
}

Rational atomic_moment(const kernels::Atomic& at, std::size_t i, std::size_t j) {
  Rational s = 0;
  if (at.diagonal) {
    const std::size_t k = i + j + 1;
    s += (ipow(at.diagonal->second, k) - ipow(at.diagonal->first, k)) / Rational(static_cast<long>(k));
  }
  for (const auto& m : at.points) s += m.mass * ipow(m.x, i) * ipow(m.y, j);
  return s;
}

Rational cauchy_moment(std::size_t i, std::size_t j) {
  return factorial(i) * factorial(j) / Rational(static_cast<long>(i + j + 1));
}

// int_{-1}^{1} int_{-1}^{1} |x - y| x^i y^j dy dx, splitting the inner integral at y = x.
Rational abs_diff_moment(std::size_t i, std::size_t j) {
  auto mono = [](std::size_t k, Rational c) {
    Coeffs<Rational> p(k + 1, Rational(0));
    p[k] = std::move(c);
    return p;
  };
  const Rational j1(static_cast<long>(j + 1)), j2(static_cast<long>(j + 2));
  const Rational sgn1 = (j + 1) % 2 == 0 ? 1 : -1;  // (-1)^(j+1)
  const Rational sgn2 = -sgn1;                      // (-1)^(j+2)
  // int_{-1}^{x} (x - y) y^j dy = x (x^(j+1) - sgn1)/(j+1) - (x^(j+2) - sgn2)/(j+2)
  Coeffs<Rational> inner = numerics::add(mono(j + 2, 1 / j1), mono(1, -sgn1 / j1));
  inner = numerics::add(inner, numerics::add(mono(j + 2, -1 / j2), mono(0, sgn2 / j2)));
  // int_{x}^{1} (y - x) y^j dy = (1 - x^(j+2))/(j+2) - x (1 - x^(j+1))/(j+1)
  inner = numerics::add(inner, numerics::add(mono(0, 1 / j2), mono(j + 2, -1 / j2)));
  inner = numerics::add(inner, numerics::add(mono(1, -1 / j1), mono(j + 2, 1 / j1)));
  const auto full = numerics::multiply(inner, mono(i, 1));
  Rational s = 0;
  for (std::size_t k = 0; k < full.size(); ++k)
    if (k % 2 == 0) s += 2 * full[k] / Rational(static_cast<long>(k + 1));
  return s;
}

bool gaussian_chain(const WeightSpec& spec) {
  auto ch = kernels::as_chain(spec);
  return ch && ch->all_quadratic();
}

MomentPath natural_path(const WeightSpec& spec) {
  if (std::holds_alternative<kernels::Atomic>(spec) || std::holds_alternative<kernels::CauchyExp>(spec) ||
      std::holds_alternative<kernels::AbsDiff>(spec)) {
    return MomentPath::Exact;
  }
  if (gaussian_chain(spec)) return MomentPath::ScaledExact;
  if (std::holds_alternative<kernels::SinProduct>(spec)) return MomentPath::Series;
  return MomentPath::Quadrature;
}

// int_0^1 int_0^1 x^i y^j sin(pi x y) dx dy
//   = sum_k (-1)^k pi^(2k+1) / ((2k+1)! (i+2k+2) (j+2k+2)),
// summed until the (alternating, eventually decreasing) terms drop below
// the working precision.
Real sin_product_moment(std::size_t i, std::size_t j) {
  const Real pi_sq = pi() * pi();
  const Real eps = pow2(-(working_bits() + 16));
  Real power = pi();  // pi^(2k+1) / (2k+1)!
  Real acc(0);
  for (long k = 0;; ++k) {
    const long a = static_cast<long>(i) + 2 * k + 2, b = static_cast<long>(j) + 2 * k + 2;
    const Real term = power / Real(a) / Real(b);
    acc += (k % 2 == 0) ? term : -term;
    if (k > 2 && term < eps * abs(acc)) break;
    power *= pi_sq / Real((2 * k + 2) * (2 * k + 3));
  }
  return acc;
}

struct ExactTable {
  Matrix<Rational> rational;
  std::optional<Real> scale;
};

ExactTable exact_table(const WeightSpec& spec, std::size_t n) {
  Matrix<Rational> m(n + 1, n + 1);
  if (gaussian_chain(spec)) {
    if (2 * n > kMaxGaussianOrder) {
      throw Error(ErrorCode::InvalidArgument,
                  "Gaussian moments are capped at i + j <= " + std::to_string(kMaxGaussianOrder));
    }
    const auto form = kernels::endpoint_form(*kernels::as_chain(spec));
    return {gaussian_moment_table(form.mean(), form.covariance(), n), form.total_mass()};
  }
  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = 0; j <= n; ++j) {
      if (const auto* at = std::get_if<kernels::Atomic>(&spec)) {
        m(i, j) = atomic_moment(*at, i, j);
      } else if (std::holds_alternative<kernels::CauchyExp>(spec)) {
        m(i, j) = cauchy_moment(i, j);
      } else {
        m(i, j) = abs_diff_moment(i, j);
      }
    }
  }
  return {std::move(m), std::nullopt};
}

[[noreturn]] void rethrow_quadrature(const Error& e) {
  const std::string what = e.what();
  if (e.code() == ErrorCode::NonConvergence &&
      (what.find("no decay") != std::string::npos || what.find("tail beyond") != std::string::npos)) {
    throw Error(ErrorCode::MomentDiverges, "moment integrand does not decay: " + what);
  }
  throw;
}

// M_ij for 0 <= i, j <= n by nested quadrature: an inner vector integral
// over y for each outer abscissa x.  Chains are integrated inside-out one
// variable at a time, memoizing each level on its abscissa.  Entries with
// i + j > max_total may be left zero.
Matrix<Real> quadrature_table(const WeightSpec& spec, std::size_t n, const PrecisionCtx& ctx,
                              std::size_t max_total = std::numeric_limits<std::size_t>::max()) {
  PrecisionScope scope(ctx.bits());
  const std::size_t m = n + 1;
  std::function<std::vector<Real>(const Real&)> inner;
  IntegrationDomain x_domain = IntegrationDomain::full_line();
  std::vector<std::unordered_map<std::string, std::vector<Real>>> memo;

  auto powers_into = [m](const Real& t, const Real& w, std::vector<Real>& out) {
    Real tp = w;
    for (std::size_t j = 0; j < m; ++j) {
      out[j] = tp;
      tp *= t;
    }
  };

  const auto chain = kernels::as_chain(spec);
  const auto ev = kernels::make_evaluator(spec);
  std::function<std::vector<Real>(std::size_t, const Real&)> level;
  if (chain) {
    const std::size_t p = chain->length();
    memo.resize(p);
    // level(k, s)_j = int w_k(s, t) * (t^j if k is the last factor, else level(k+1, t)_j) dt
    level = [&, p](std::size_t k, const Real& s) -> std::vector<Real> {
      const bool cacheable = k > 0;
      std::string key;
      if (cacheable) {
        key = s.to_hex();
        if (auto it = memo[k].find(key); it != memo[k].end()) return it->second;
      }
      auto r = numerics::integrate(
          [&](const Real& t, std::vector<Real>& out) {
            const Real w = kernels::chain_factor(*chain, k, s, t);
            if (k + 2 == p) {
              powers_into(t, w, out);
            } else {
              const auto next = level(k + 1, t);
              for (std::size_t j = 0; j < m; ++j) out[j] = w * next[j];
            }
          },
          m, IntegrationDomain::full_line(), ctx);
      if (cacheable) memo[k].emplace(key, r.value);
      return std::move(r.value);
    };
    inner = [&](const Real& x) { return level(0, x); };
  } else {
    x_domain = ev.x_support();
    inner = [&](const Real& x) {
      const auto& yd = ev.y_support();
      std::vector<IntegrationDomain> pieces;
      Rational lo = yd.lower();
      for (const auto& b : ev.y_breakpoints(x)) {
        const Rational q = b.to_rational();
        if (q > lo && (!yd.has_upper() || q < yd.upper())) {
          pieces.push_back(IntegrationDomain::finite(lo, q, yd.singular_lower() && lo == yd.lower(), false));
          lo = q;
        }
      }
      if (pieces.empty()) {
        pieces.push_back(yd);
      } else if (yd.kind() == IntegrationDomain::Kind::Finite) {
        pieces.push_back(IntegrationDomain::finite(lo, yd.upper(), false, yd.singular_upper()));
      } else {
        pieces.push_back(IntegrationDomain::half_line(lo));
      }
      std::vector<Real> total(m, Real(0));
      const Real tiny = pow2(-ctx.bits() / 4);
      std::vector<Real> buf(m);
      for (const auto& piece : pieces) {
        if (piece.kind() == IntegrationDomain::Kind::Finite) {
          const Real a(piece.lower()), b(piece.upper());
          const Real half = (b - a) / 2;
          if (half < tiny) {
            // Three-point Gauss: error O(len^7), far below 2^-bits here.
            const Real mid = (a + b) / 2, off = half * sqrt(Real(3) / 5);
            const Real nodes[3] = {mid - off, mid, mid + off};
            const Real weights[3] = {half * 5 / 9, half * 8 / 9, half * 5 / 9};
            for (int k = 0; k < 3; ++k) {
              powers_into(nodes[k], weights[k] * ev(x, nodes[k], ctx), buf);
              for (std::size_t j = 0; j < m; ++j) total[j] += buf[j];
            }
            continue;
          }
        }
        auto r = numerics::integrate(
            [&](const Real& y, std::vector<Real>& out) { powers_into(y, ev(x, y, ctx), out); }, m, piece, ctx);
        for (std::size_t j = 0; j < m; ++j) total[j] += r.value[j];
      }
      return total;
    };
  }

  Matrix<Real> out(m, m);
  if (!chain && ev.corner_singular()) {
    // x = s u, y = s (1 - u), dx dy = s ds du, and x^i y^j = s^(i+j) u^i (1-u)^j.
    // The inner integral runs over the degree-D Bernstein basis
    // u^a (1-u)^(D-a) only; lower-degree products are recovered exactly by
    // u^i (1-u)^j = sum_k C(D-d, k) u^(i+k) (1-u)^(D-i-k), d = i + j,
    // whose coefficients are all positive.
    const std::size_t deg = std::min(2 * n, max_total);
    const std::size_t nb = deg + 1;
    const auto unit = IntegrationDomain::finite(0, 1);
    try {
      auto r = numerics::integrate(
          [&](const Real& s, std::vector<Real>& buf) {
            auto in = numerics::integrate(
                [&](const Real& u, std::vector<Real>& ibuf) {
                  const Real x = s * u, y = s - x, v = 1 - u;
                  const Real k = ev(x, y, ctx) * s;
                  std::vector<Real> vp(nb);
                  vp[0] = Real(1);
                  for (std::size_t b = 1; b < nb; ++b) vp[b] = vp[b - 1] * v;
                  Real up = k;
                  for (std::size_t a = 0; a < nb; ++a) {
                    ibuf[a] = up * vp[deg - a];
                    up *= u;
                  }
                },
                nb, unit, ctx);
            Real sp(1);
            for (std::size_t d = 0; d < nb; ++d) {
              for (std::size_t a = 0; a < nb; ++a) buf[d * nb + a] = sp * in.value[a];
              sp *= s;
            }
          },
          nb * nb, IntegrationDomain::half_line(0), ctx);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
          const std::size_t d = i + j;
          if (d > deg) continue;
          Real acc(0);
          Integer binom(1);
          for (std::size_t k = 0; k <= deg - d; ++k) {
            acc += Real(binom) * r.value[d * nb + i + k];
            binom = binom * static_cast<unsigned long>(deg - d - k) / static_cast<unsigned long>(k + 1);
          }
          out(i, j) = acc;
        }
      }
    } catch (const Error& e) {
      rethrow_quadrature(e);
    }
    return out;
  }
  try {
    auto r = numerics::integrate(
        [&](const Real& x, std::vector<Real>& buf) {
          const auto v = inner(x);
          Real xp(1);
          for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) buf[i * m + j] = xp * v[j];
            xp *= x;
          }
        },
        m * m, x_domain, ctx);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) out(i, j) = r.value[i * m + j];
  } catch (const Error& e) {
    rethrow_quadrature(e);
  }
  return out;
}

PrecisionCtx nested_ctx(const PrecisionCtx& ctx, std::size_t n) {
  PrecisionScope scope(ctx.bits());
  const long m = static_cast<long>(n + 1);
  return ctx.with_quad_tol(ctx.quad_rel_tol() / Real(m * m));
}

}  // namespace

MomentValue moment(const WeightSpec& spec, std::size_t i, std::size_t j, const PrecisionCtx& ctx,
                   const MomentOptions& options) {
  kernels::validate(spec);
  PrecisionScope scope(ctx.bits());
  const MomentPath path = options.force_quadrature ? MomentPath::Quadrature : natural_path(spec);
  if (path == MomentPath::Quadrature) {
    const std::size_t n = std::max(i, j);
    auto table = quadrature_table(spec, n, nested_ctx(ctx, n), i + j);
    return {path, std::nullopt, std::nullopt, table(i, j)};
  }
  if (path == MomentPath::Series) return {path, std::nullopt, std::nullopt, sin_product_moment(i, j)};
  if (path == MomentPath::ScaledExact) {
    if (i + j > kMaxGaussianOrder) {
      throw Error(ErrorCode::InvalidArgument,
                  "Gaussian moments are capped at i + j <= " + std::to_string(kMaxGaussianOrder));
    }
    const auto form = kernels::endpoint_form(*kernels::as_chain(spec));
    const auto table = gaussian_moment_table(form.mean(), form.covariance(), std::max(i, j));
    Real scale = form.total_mass();
    Real value = scale * Real(table(i, j));
    return {path, table(i, j), std::move(scale), std::move(value)};
  }
  Rational q;
  if (const auto* at = std::get_if<kernels::Atomic>(&spec)) {
    q = atomic_moment(*at, i, j);
  } else if (std::holds_alternative<kernels::CauchyExp>(spec)) {
    q = cauchy_moment(i, j);
  } else {
    q = abs_diff_moment(i, j);
  }
  return {path, q, std::nullopt, Real(q)};
}

MomentMatrix moment_matrix(const WeightSpec& spec, std::size_t n, const PrecisionCtx& ctx,
                           const MomentOptions& options) {
  kernels::validate(spec);
  const PrecisionCtx mctx = ctx.for_moments(n);
  PrecisionScope scope(mctx.bits());
  MomentMatrix out;
  out.n = n;
  out.kernel_hash = kernels::kernel_hash(spec);
  out.bits = mctx.bits();
  out.path = options.force_quadrature ? MomentPath::Quadrature : natural_path(spec);
  out.symmetric_kernel = kernels::symmetric(spec);
  const std::size_t m = n + 1;

  std::optional<MomentCache> cache;
  std::map<std::pair<std::size_t, std::size_t>, CacheEntry> cached;
  // Only natural-path values are persisted, so a forced run never shadows them.
  if (options.cache_dir && out.path == natural_path(spec)) {
    cache.emplace(*options.cache_dir, out.kernel_hash, out.bits);
    cached = cache->load();
  }
  const bool want_rational = out.path == MomentPath::Exact || out.path == MomentPath::ScaledExact;
  bool complete = cache.has_value();
  for (std::size_t i = 0; i < m && complete; ++i) {
    for (std::size_t j = 0; j < m && complete; ++j) {
      auto it = cached.find({i, j});
      complete = it != cached.end() && (want_rational ? it->second.rational.has_value() : it->second.real.has_value());
    }
  }

  if (want_rational) {
    Matrix<Rational> q(m, m);
    if (complete) {
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) q(i, j) = *cached.at({i, j}).rational;
      if (out.path == MomentPath::ScaledExact) out.scale = kernels::endpoint_form(*kernels::as_chain(spec)).total_mass();
    } else {
      auto t = exact_table(spec, n);
      q = std::move(t.rational);
      out.scale = std::move(t.scale);
    }
    out.real = Matrix<Real>(m, m);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        out.real(i, j) = Real(q(i, j));
        if (out.scale) out.real(i, j) *= *out.scale;
      }
    }
    out.rational = std::move(q);
  } else if (complete) {
    out.real = Matrix<Real>(m, m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) out.real(i, j) = *cached.at({i, j}).real;
  } else if (out.path == MomentPath::Series) {
    out.real = Matrix<Real>(m, m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) out.real(i, j) = sin_product_moment(i, j);
  } else {
    out.real = quadrature_table(spec, n, nested_ctx(mctx, n));
  }

  if (cache && !complete) {
    std::vector<CacheEntry> fresh;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        auto it = cached.find({i, j});
        CacheEntry e{i, j, std::nullopt, std::nullopt};
        if (want_rational && (it == cached.end() || !it->second.rational)) e.rational = (*out.rational)(i, j);
        if (!want_rational && (it == cached.end() || !it->second.real)) e.real = out.real(i, j);
        if (e.rational || e.real) fresh.push_back(std::move(e));
      }
    }
    cache->append(fresh);
  }
  return out;
}

Matrix<Real> quadrature_triangle(const WeightSpec& spec, std::size_t degree, const PrecisionCtx& ctx) {
  kernels::validate(spec);
  PrecisionScope scope(ctx.bits());
  auto t = quadrature_table(spec, degree, nested_ctx(ctx, degree), degree);
  for (std::size_t i = 0; i <= degree; ++i)
    for (std::size_t j = degree - i + 1; j <= degree; ++j) t(i, j) = Real(0);
  return t;
}

GramSequence gram_sequence(const MomentMatrix& m, const PrecisionCtx& ctx) {
  const PrecisionCtx gctx = ctx.bits() >= m.bits ? ctx : PrecisionCtx(m.bits);
  PrecisionScope scope(gctx.bits());
  GramSequence g;
  const std::size_t count = m.n + 1;
  if (m.rational) {
    g.exact.emplace();
    Real scale_power = m.scale ? *m.scale : Real(1);
    for (std::size_t k = 0; k < count; ++k) {
      Rational d = numerics::determinant(m.rational->leading(k + 1));
      g.singular.push_back(d == 0);
      g.d.push_back(scale_power * Real(d));
      g.exact->push_back(std::move(d));
      if (m.scale) scale_power *= *m.scale;
    }
    return g;
  }
  for (std::size_t k = 0; k < count; ++k) {
    auto block = m.real.leading(k + 1);
    // Moments span many binades; exact power-of-two row and column scaling
    // keeps the pivot-relative singularity test meaningful.
    long shift = 0;
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t a = 0; a <= k; ++a) {
        long e = std::numeric_limits<long>::min();
        for (std::size_t b = 0; b <= k; ++b) {
          const Real& v = pass == 0 ? block(a, b) : block(b, a);
          if (!v.is_zero()) e = std::max(e, v.exponent());
        }
        if (e == std::numeric_limits<long>::min()) continue;
        for (std::size_t b = 0; b <= k; ++b) {
          Real& v = pass == 0 ? block(a, b) : block(b, a);
          v = ldexp(v, -e);
        }
        shift += e;
      }
    }
    const auto r = numerics::pivoted_determinant(block, gctx);
    g.d.push_back(ldexp(r.determinant, shift));
    g.singular.push_back(r.min_pivot_ratio <= pow2(16 - gctx.bits()));
  }
  return g;
}

MomentMatrix decoupled_moment_matrix(const WeightSpec& chain_spec, std::size_t n, const PrecisionCtx& ctx) {
  auto chain = kernels::as_chain(chain_spec);
  if (!chain) throw Error(ErrorCode::UnsupportedSpec, "the decoupled limit is defined for chain weights");
  const PrecisionCtx mctx = ctx.for_moments(n);
  PrecisionScope scope(mctx.bits());
  const std::size_t m = n + 1;
  const auto line = IntegrationDomain::full_line();

  // Endpoint factors exp(-V(x)/2) (interior variables keep exp(-V)).
  auto marginal = [&](const kernels::Potential& v, const Real& weight) {
    auto r = numerics::integrate(
        [&](const Real& x, std::vector<Real>& out) {
          Real w = exp(-weight * v(x));
          for (std::size_t k = 0; k < m; ++k) {
            out[k] = w;
            w *= x;
          }
        },
        m, line, nested_ctx(mctx, n));
    return r.value;
  };
  const auto& first = chain->potentials.front();
  const auto& last = chain->potentials.back();
  Real interior(1);
  for (std::size_t k = 1; k + 1 < chain->length(); ++k) interior *= marginal(chain->potentials[k], Real(1))[0];

  MomentMatrix out;
  out.n = n;
  out.bits = mctx.bits();
  out.symmetric_kernel = first == last;
  out.real = Matrix<Real>(m, m);
  if (first.quadratic() && last.quadratic()) {
    // Exact: each endpoint is a normal law N(-a1/(2 a2), 1/a2) up to its mass.
    auto law = [](const kernels::Potential& v) {
      const auto& c = v.coeffs();
      return std::make_pair(Rational(-c[1] / (2 * c[2])), Rational(1 / c[2]));
    };
    const auto [mx, vx] = law(first);
    const auto [my, vy] = law(last);
    Matrix<Rational> cov(2, 2);
    cov(0, 0) = vx;
    cov(1, 1) = vy;
    out.rational = gaussian_moment_table({mx, my}, cov, n);
    out.scale = marginal(first, Real(1) / 2)[0] * marginal(last, Real(1) / 2)[0] * interior;
    out.path = MomentPath::ScaledExact;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) out.real(i, j) = *out.scale * Real((*out.rational)(i, j));
  } else {
    const auto fx = marginal(first, Real(1) / 2);
    const auto fy = marginal(last, Real(1) / 2);
    out.path = MomentPath::Quadrature;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) out.real(i, j) = fx[i] * fy[j] * interior;
  }
  out.kernel_hash = "decoupled:" + kernels::kernel_hash(chain_spec);
  return out;
}

}  // namespace biorth::moments
