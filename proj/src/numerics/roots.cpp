#include "biorth/numerics/roots.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "biorth/errors.hpp"

namespace biorth::numerics {

namespace {

struct Eval {
  Complex value;
  Complex slope;
};

Eval horner_with_derivative(const Coeffs<Real>& p, const Complex& z) {
  Complex v(Real(0), Real(0)), d(Real(0), Real(0));
  for (std::size_t i = p.size(); i-- > 0;) {
    d = d * z + v;
    v = v * z + Complex(p[i]);
  }
  return {v, d};
}

Real magnitude_scale(const Coeffs<Real>& p, const Real& r) {
  Real s(0);
  for (std::size_t i = p.size(); i-- > 0;) s = s * r + abs(p[i]);
  return s;
}

bool less_complex(const Complex& a, const Complex& b) {
  if (a.re != b.re) return a.re < b.re;
  return a.im < b.im;
}

// Snaps near-real roots onto the axis and symmetrizes conjugate pairs.  A
// root is snapped when the axis lies inside its Newton inclusion disk
// |z - root| <= n|p/p'|, which also catches the spread of a multiple root.
std::vector<Complex> pair_conjugates(const Coeffs<Real>& p, std::vector<Complex> z, long bits) {
  std::vector<Complex> out, upper, lower;
  const Real tiny = pow2(-bits / 2);
  const Real n(static_cast<long>(z.size()));
  for (auto& r : z) {
    Real radius = tiny * (1 + abs(r));
    const Eval e = horner_with_derivative(p, r);
    if (!abs(e.slope).is_zero()) radius = max(radius, n * abs(e.value) / abs(e.slope));
    if (abs(r.im) <= radius) {
      out.emplace_back(r.re, Real(0));
    } else if (r.im > 0) {
      upper.push_back(r);
    } else {
      lower.push_back(r);
    }
  }
  if (upper.size() != lower.size()) {
    throw Error(ErrorCode::IterationStall, "non-real roots of a real polynomial failed to pair up");
  }
  std::vector<bool> used(lower.size(), false);
  for (const auto& u : upper) {
    std::size_t best = lower.size();
    Real best_d;
    for (std::size_t j = 0; j < lower.size(); ++j) {
      if (used[j]) continue;
      Real d = abs(u - conj(lower[j]));
      if (best == lower.size() || d < best_d) {
        best = j;
        best_d = std::move(d);
      }
    }
    used[best] = true;
    Complex mid((u.re + lower[best].re) / 2, (u.im - lower[best].im) / 2);
    out.push_back(mid);
    out.push_back(conj(mid));
  }
  std::sort(out.begin(), out.end(), less_complex);
  return out;
}

}  // namespace

std::vector<Complex> poly_roots(const Coeffs<Real>& input, const PrecisionCtx& ctx) {
  PrecisionScope scope(ctx.bits());
  Coeffs<Real> p;
  for (const auto& c : input) {
    if (!c.is_finite()) throw Error(ErrorCode::InvalidArgument, "polynomial coefficient is not finite");
    p.push_back(c.rounded());
  }
  trim(p);
  const long n = degree(p);
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "root finding needs degree >= 1");
  // Exact zero roots are split off; the residual test below is relative to
  // |p| near the root and says nothing at z = 0.
  std::size_t zeros_at_origin = 0;
  while (zeros_at_origin < p.size() && p[zeros_at_origin].is_zero()) ++zeros_at_origin;
  if (zeros_at_origin > 0) {
    std::vector<Complex> out(zeros_at_origin, Complex(Real(0), Real(0)));
    if (static_cast<long>(zeros_at_origin) < n) {
      const Coeffs<Real> rest(p.begin() + static_cast<long>(zeros_at_origin), p.end());
      auto more = poly_roots(rest, ctx);
      out.insert(out.end(), more.begin(), more.end());
      std::sort(out.begin(), out.end(), less_complex);
    }
    return out;
  }

  const Real lead = p.back();
  for (auto& c : p) c /= lead;

  if (n == 1) return {Complex(-p[0], Real(0))};

  // Starting circle from the largest |a_k|^(1/(n-k)).
  Real radius(0);
  for (long k = 0; k < n; ++k) {
    const Real a = abs(p[static_cast<std::size_t>(k)]);
    if (a.is_zero()) continue;
    radius = max(radius, exp(log(a) / Real(n - k)));
  }
  if (radius.is_zero()) radius = Real(1);

  std::vector<Complex> z;
  const Real two_pi = 2 * pi();
  for (long k = 0; k < n; ++k) {
    const Real angle = two_pi * Real(k) / Real(n) + Real(0.4);
    z.emplace_back(radius * cos(angle), radius * sin(angle));
  }

  const Real step_tol = pow2(8 - ctx.bits());
  const Real res_tol = pow2(8 - ctx.bits());
  std::vector<bool> done(static_cast<std::size_t>(n), false);
  const int max_iter = 100 + 20 * static_cast<int>(n) + static_cast<int>(ctx.bits());
  bool all_done = false;
  for (int it = 0; it < max_iter && !all_done; ++it) {
    all_done = true;
    for (std::size_t k = 0; k < z.size(); ++k) {
      if (done[k]) continue;
      const Eval e = horner_with_derivative(p, z[k]);
      const Real absz = abs(z[k]);
      if (abs(e.value) <= res_tol * magnitude_scale(p, absz)) {
        done[k] = true;
        continue;
      }
      all_done = false;
      Complex sum(Real(0), Real(0));
      for (std::size_t j = 0; j < z.size(); ++j) {
        if (j == k) continue;
        Complex diff = z[k] - z[j];
        if (abs(diff).is_zero()) diff.re = pow2(-ctx.bits()) * (1 + absz);
        sum += Complex(Real(1), Real(0)) / diff;
      }
      Complex w;
      if (abs(e.slope).is_zero()) {
        w = Complex(pow2(-ctx.bits() / 4) * (1 + absz), pow2(-ctx.bits() / 4) * (1 + absz));
      } else {
        const Complex ratio = e.value / e.slope;
        w = ratio / (Complex(Real(1), Real(0)) - ratio * sum);
      }
      z[k] -= w;
      if (abs(w) <= step_tol * (1 + abs(z[k]))) done[k] = true;
    }
  }

  const Real bound = pow2(32 - ctx.bits());
  for (const auto& r : z) {
    const Eval e = horner_with_derivative(p, r);
    if (abs(e.value) > bound * magnitude_scale(p, abs(r))) {
      throw Error(ErrorCode::IterationStall,
                  "Aberth iteration stalled at " + std::to_string(ctx.bits()) + " bits (degree " +
                      std::to_string(n) + ")");
    }
  }
  return pair_conjugates(p, std::move(z), ctx.bits());
}

std::vector<Complex> poly_roots(const Coeffs<Rational>& p, const PrecisionCtx& ctx) {
  PrecisionScope scope(ctx.bits());
  Coeffs<Real> r;
  for (const auto& c : p) r.emplace_back(c);
  return poly_roots(r, ctx);
}

Coeffs<Real> expand_roots(const std::vector<Complex>& roots) {
  std::vector<Complex> c{Complex(Real(1), Real(0))};
  for (const auto& z : roots) {
    std::vector<Complex> next(c.size() + 1, Complex(Real(0), Real(0)));
    for (std::size_t i = 0; i < c.size(); ++i) {
      next[i + 1] += c[i];
      next[i] -= c[i] * z;
    }
    c = std::move(next);
  }
  Coeffs<Real> out;
  for (auto& v : c) out.push_back(std::move(v.re));
  return out;
}

}  // namespace biorth::numerics
