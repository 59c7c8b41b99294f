#include "biorth/positivity/positivity.hpp"

#include <algorithm>
#include <functional>

#include "biorth/errors.hpp"
#include "biorth/kernels/evaluator.hpp"
#include "biorth/numerics/linalg.hpp"

namespace biorth::positivity {

using kernels::KernelEvaluator;
using nlohmann::json;
using numerics::Matrix;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

SampleStream::SampleStream(std::uint64_t seed, std::uint64_t sample)
    : key_(splitmix64(splitmix64(seed) ^ (sample * 0xd1b54a32d192ed03ULL))) {}

std::uint64_t SampleStream::next_word() { return splitmix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

Real SampleStream::uniform() {
  Real u(0);
  const long words = (working_bits() + 63) / 64;
  for (long k = 1; k <= words; ++k) u += ldexp(Real(static_cast<unsigned long>(next_word())), -64 * k);
  return u;
}

Real SampleStream::normal() {
  const Real u1 = 1 - uniform();  // (0, 1]
  const Real u2 = uniform();
  return sqrt(-2 * log(u1)) * cos(2 * pi() * u2);
}

Real SampleStream::draw(const IntegrationDomain& d) {
  switch (d.kind()) {
    case IntegrationDomain::Kind::Finite:
      return Real(d.lower()) + Real(d.upper() - d.lower()) * uniform();
    case IntegrationDomain::Kind::HalfLine:
      return Real(d.lower()) + 2 * abs(normal());
    case IntegrationDomain::Kind::FullLine:
      return 2 * normal();
  }
  return Real(0);
}

std::vector<Real> SampleStream::ascending(const IntegrationDomain& d, std::size_t n) {
  std::vector<Real> v;
  while (v.size() < n) {
    Real x = draw(d);
    if (std::none_of(v.begin(), v.end(), [&](const Real& y) { return y == x; })) v.push_back(std::move(x));
  }
  std::sort(v.begin(), v.end());
  return v;
}

int expected_sign(const kernels::WeightSpec& spec, std::size_t n) {
  const auto chain = kernels::as_chain(spec);
  if (!chain) return 1;
  const bool odd_pairs = (n * (n - 1) / 2) % 2 == 1;
  int sign = 1;
  for (const auto& c : chain->couplings)
    if (c > 0 && odd_pairs) sign = -sign;
  return sign;
}

namespace {

Matrix<Real> equilibrated(const KernelEvaluator& ev, const std::vector<Real>& xs, const std::vector<Real>& ys,
                          const PrecisionCtx& ctx, Real& scale) {
  const std::size_t n = xs.size();
  Matrix<Real> m = kernels::kernel_matrix(ev, xs, ys, ctx);
  // Positive row and column scalings keep the sign and stop entries like
  // exp(-x^4/2) from tripping the singularity test.
  auto equilibrate = [&](bool rows) {
    for (std::size_t a = 0; a < n; ++a) {
      Real big(0);
      for (std::size_t b = 0; b < n; ++b) big = max(big, abs(rows ? m(a, b) : m(b, a)));
      if (big.is_zero()) continue;
      for (std::size_t b = 0; b < n; ++b) (rows ? m(a, b) : m(b, a)) /= big;
      scale *= big;
    }
  };
  equilibrate(true);
  equilibrate(false);
  return m;
}

Real kernel_det(const KernelEvaluator& ev, const std::vector<Real>& xs, const std::vector<Real>& ys,
                const PrecisionCtx& ctx, bool& singular) {
  PrecisionScope scope(ctx.bits());
  Real scale(1);
  const Matrix<Real> m = equilibrated(ev, xs, ys, ctx, scale);
  singular = false;
  try {
    return scale * numerics::det_and_solve(m, nullptr, ctx).determinant;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SingularMatrix) throw;
    singular = true;
    return Real(0);
  }
}

Real plain_det(const KernelEvaluator& ev, const std::vector<Real>& xs, const std::vector<Real>& ys,
               const PrecisionCtx& ctx) {
  PrecisionScope scope(ctx.bits());
  Real scale(1);
  const Matrix<Real> m = equilibrated(ev, xs, ys, ctx, scale);
  return scale * numerics::determinant(m, ctx);
}

// A pivot at rounding level may still hide an accurately computable
// determinant (steep kernels).  It is accepted once the values at 2x, 4x
// and 8x the working precision settle to half the working bits.
Real sampled_det(const KernelEvaluator& ev, const std::vector<Real>& xs, const std::vector<Real>& ys,
                 const PrecisionCtx& ctx, bool& resolved) {
  bool singular = true;
  Real det = kernel_det(ev, xs, ys, ctx, singular);
  resolved = !singular;
  if (resolved) return det;
  PrecisionCtx c = ctx.doubled();
  Real prev = plain_det(ev, xs, ys, c);
  for (int attempt = 0; attempt < 2; ++attempt) {
    c = c.doubled();
    Real next = plain_det(ev, xs, ys, c);
    PrecisionScope scope(c.bits());
    if (!next.is_zero() && abs(next - prev) <= pow2(-ctx.bits() / 2) * abs(next)) {
      resolved = true;
      return next;
    }
    prev = std::move(next);
  }
  return prev;
}

// det to relative 2^-(bits+2): extra guard bits, doubled until two estimates
// agree.  Ill-conditioned tuples otherwise lose tens of bits.
Real guarded_det(const KernelEvaluator& ev, const std::vector<Real>& xs, const std::vector<Real>& ys,
                 const PrecisionCtx& ctx, bool& singular) {
  long guard = 32;
  Real prev = kernel_det(ev, xs, ys, PrecisionCtx(ctx.bits() + guard), singular);
  while (guard < 4 * ctx.bits()) {
    guard *= 2;
    PrecisionScope scope(ctx.bits() + guard);
    Real next = kernel_det(ev, xs, ys, PrecisionCtx(ctx.bits() + guard), singular);
    if (!singular && abs(next - prev) <= pow2(-ctx.bits() - 2) * abs(next)) {
      PrecisionScope out(ctx.bits());
      return next.rounded();
    }
    prev = std::move(next);
  }
  PrecisionScope out(ctx.bits());
  return prev.rounded();
}

}  // namespace

PositivityReport sample_positivity(const kernels::WeightSpec& spec, std::size_t n, std::size_t samples,
                                   std::uint64_t seed, const PrecisionCtx& ctx) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "positivity order must be >= 1");
  const auto ev = kernels::make_evaluator(spec);
  if (!ev.pointwise()) throw Error(ErrorCode::UnsupportedSpec, "atomic weights have no pointwise determinant");
  PrecisionScope scope(ctx.bits());
  PositivityReport r;
  r.kernel = std::string(kernels::type_name(spec));
  r.n = n;
  r.samples = samples;
  r.seed = seed;
  r.bits = ctx.bits();
  r.expected_sign = expected_sign(spec, n);
  bool first = true;
  for (std::size_t s = 0; s < samples; ++s) {
    SampleStream rng(seed, s);
    PositivitySample sample;
    sample.index = s;
    sample.xs = rng.ascending(ev.x_support(), n);
    sample.ys = rng.ascending(ev.y_support(), n);
    bool resolved = false;
    sample.det_value = sampled_det(ev, sample.xs, sample.ys, ctx, resolved);
    sample.det_value = sample.det_value.rounded();
    if (sample.det_value.sign() > 0) ++r.raw_positive;
    sample.positive = resolved && sample.det_value.sign() == r.expected_sign;
    if (!resolved) {
      r.inconclusive.push_back(std::move(sample));
      continue;
    }
    const Real signed_det = r.expected_sign * sample.det_value;
    if (first || signed_det < r.min_det) r.min_det = signed_det;
    first = false;
    if (!sample.positive) r.violations.push_back(std::move(sample));
  }
  return r;
}

BinetCauchyCheck binet_cauchy_check(const kernels::WeightSpec& a, const kernels::WeightSpec& b,
                                    const std::vector<Real>& xs, const std::vector<Real>& ys,
                                    const PrecisionCtx& ctx) {
  const std::size_t n = xs.size();
  if (n < 1 || n > 3 || ys.size() != n) throw Error(ErrorCode::InvalidArgument, "Binet-Cauchy check needs 1 <= n <= 3");
  for (std::size_t k = 1; k < n; ++k) {
    if (!(xs[k - 1] < xs[k]) || !(ys[k - 1] < ys[k])) {
      throw Error(ErrorCode::DomainError, "Binet-Cauchy tuples must be strictly ascending");
    }
  }
  const auto ea = kernels::make_evaluator(a);
  const auto eb = kernels::make_evaluator(b);
  if (!ea.pointwise() || !eb.pointwise()) throw Error(ErrorCode::UnsupportedSpec, "atomic weights are not supported");
  const IntegrationDomain& mid = ea.y_support();
  PrecisionScope scope(ctx.bits());
  BinetCauchyCheck out;

  // Convolved entries as one vector integral.
  auto conv = numerics::integrate(
      [&](const Real& s, std::vector<Real>& v) {
        std::vector<Real> av(n), bv(n);
        for (std::size_t j = 0; j < n; ++j) {
          av[j] = ea(xs[j], s, ctx);
          bv[j] = eb(s, ys[j], ctx);
        }
        for (std::size_t j = 0; j < n; ++j)
          for (std::size_t k = 0; k < n; ++k) v[j * n + k] = av[j] * bv[k];
      },
      n * n, mid, ctx);
  Matrix<Real> lhs(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) lhs(j, k) = conv.value[j * n + k];
  out.lhs = numerics::determinant(lhs, ctx);

  if (kernels::as_chain(a) && kernels::as_chain(b)) {
    const auto ec = kernels::make_evaluator(kernels::convolve(a, b));
    Matrix<Real> m(n, n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) m(j, k) = ec(xs[j], ys[k], ctx);
    out.lhs_closed = numerics::determinant(m, ctx);
  }

  // Columns A(x_., s_d) and B(s_d, y_.) for the fixed outer variables.
  std::vector<std::vector<Real>> acol(n), bcol(n);
  std::function<Real(std::size_t)> nest = [&](std::size_t d) -> Real {
    if (d == n) {
      Matrix<Real> ma(n, n), mb(n, n);
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
          ma(j, k) = acol[k][j];
          mb(j, k) = bcol[j][k];
        }
      }
      return numerics::determinant(ma, ctx) * numerics::determinant(mb, ctx);
    }
    return numerics::integrate(
               [&](const Real& s) {
                 acol[d].resize(n);
                 bcol[d].resize(n);
                 for (std::size_t j = 0; j < n; ++j) {
                   acol[d][j] = ea(xs[j], s, ctx);
                   bcol[d][j] = eb(s, ys[j], ctx);
                 }
                 return nest(d + 1);
               },
               mid, ctx)
        .value;
  };
  Real fact(1);
  for (std::size_t k = 2; k <= n; ++k) fact *= Real(static_cast<long>(k));
  out.rhs = nest(0) / fact;
  out.rel_error = abs(out.lhs - out.rhs) / abs(out.lhs);
  return out;
}

PositivityReport cauchy_identity_check(std::size_t n, std::size_t samples, std::uint64_t seed,
                                       const PrecisionCtx& ctx) {
  if (n < 1 || n > 6) throw Error(ErrorCode::InvalidArgument, "Cauchy identity check needs 1 <= n <= 6");
  const kernels::WeightSpec spec = kernels::CauchyExp{};
  const auto ev = kernels::make_evaluator(spec);
  PrecisionScope scope(ctx.bits());
  PositivityReport r;
  r.kernel = "cauchy_exp";
  r.n = n;
  r.samples = samples;
  r.seed = seed;
  r.bits = ctx.bits();
  r.expected_sign = 1;
  r.max_rel_error = Real(0);
  bool first = true;
  for (std::size_t s = 0; s < samples; ++s) {
    SampleStream rng(seed, s);
    PositivitySample sample;
    sample.index = s;
    sample.xs = rng.ascending(ev.x_support(), n);
    sample.ys = rng.ascending(ev.y_support(), n);
    bool singular = false;
    sample.det_value = guarded_det(ev, sample.xs, sample.ys, ctx, singular);
    const Real rhs = kernels::cauchy_det_rhs(sample.xs, sample.ys);
    const Real rel = abs(sample.det_value - rhs) / abs(rhs);
    if (rel > *r.max_rel_error) r.max_rel_error = rel;
    if (sample.det_value.sign() > 0) ++r.raw_positive;
    sample.positive = !singular && sample.det_value.sign() > 0;
    if (first || sample.det_value < r.min_det) r.min_det = sample.det_value;
    first = false;
    if (!sample.positive) r.violations.push_back(std::move(sample));
  }
  return r;
}

json to_json(const PositivityReport& r) {
  PrecisionScope scope(r.bits);
  auto samples_json = [](const std::vector<PositivitySample>& list) {
    json out = json::array();
    for (const auto& v : list) {
      json xs = json::array(), ys = json::array();
      for (const auto& x : v.xs) xs.push_back(x.to_hex());
      for (const auto& y : v.ys) ys.push_back(y.to_hex());
      out.push_back(json{{"index", v.index}, {"xs", xs}, {"ys", ys}, {"det", v.det_value.to_hex()}});
    }
    return out;
  };
  json out{{"kernel", r.kernel},
           {"n", r.n},
           {"samples", r.samples},
           {"seed", r.seed},
           {"bits", r.bits},
           {"expected_sign", r.expected_sign},
           {"min_det", r.min_det.to_hex()},
           {"min_det_approx", r.min_det.to_decimal(12)},
           {"raw_positive", r.raw_positive},
           {"violations", samples_json(r.violations)},
           {"inconclusive", samples_json(r.inconclusive)},
           {"summary", "no violation found in " + std::to_string(r.samples) + " samples"}};
  if (!r.violations.empty()) {
    out["summary"] = std::to_string(r.violations.size()) + " violations in " + std::to_string(r.samples) + " samples";
  }
  if (!r.inconclusive.empty()) {
    out["summary"] = out["summary"].get<std::string>() + ", " + std::to_string(r.inconclusive.size()) + " inconclusive";
  }
  if (r.max_rel_error) {
    out["max_rel_error"] = r.max_rel_error->to_hex();
    out["max_rel_error_approx"] = r.max_rel_error->to_decimal(6);
  }
  return out;
}

}  // namespace biorth::positivity
