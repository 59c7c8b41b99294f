#pragma once

// Dense univariate polynomials with ascending coefficients over a field
// (Rational or Real).  Header-only because everything is templated.

#include <cstddef>
#include <utility>
#include <vector>

#include "biorth/numerics/real.hpp"

namespace biorth::numerics {

template <class T>
using Coeffs = std::vector<T>;

template <class T>
void trim(Coeffs<T>& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

/// Degree of p; -1 for the zero polynomial.
template <class T>
long degree(const Coeffs<T>& p) {
  for (std::size_t i = p.size(); i-- > 0;)
    if (!(p[i] == 0)) return static_cast<long>(i);
  return -1;
}

template <class T, class X>
X horner(const Coeffs<T>& p, const X& x) {
  X acc(0);
  for (std::size_t i = p.size(); i-- > 0;) {
    acc *= x;
    acc += X(p[i]);
  }
  return acc;
}

template <class T>
Coeffs<T> add(const Coeffs<T>& a, const Coeffs<T>& b) {
  Coeffs<T> out(std::max(a.size(), b.size()), T(0));
  for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
  return out;
}

template <class T>
Coeffs<T> scale(Coeffs<T> a, const T& s) {
  for (auto& c : a) c *= s;
  return a;
}

template <class T>
Coeffs<T> multiply(const Coeffs<T>& a, const Coeffs<T>& b) {
  if (a.empty() || b.empty()) return {};
  Coeffs<T> out(a.size() + b.size() - 1, T(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

template <class T>
Coeffs<T> power(const Coeffs<T>& a, std::size_t k) {
  Coeffs<T> out{T(1)};
  for (std::size_t i = 0; i < k; ++i) out = multiply(out, a);
  return out;
}

template <class T>
Coeffs<T> derivative(const Coeffs<T>& p) {
  if (p.size() <= 1) return {};
  Coeffs<T> d(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = p[i] * T(static_cast<long>(i));
  return d;
}

/// Long division a = q*b + r; b must be nonzero (leading coefficient after trim).
template <class T>
std::pair<Coeffs<T>, Coeffs<T>> divmod(Coeffs<T> a, Coeffs<T> b) {
  trim(a);
  trim(b);
  if (a.size() < b.size()) return {{}, a};
  Coeffs<T> q(a.size() - b.size() + 1, T(0));
  const T lead = b.back();
  for (std::size_t k = q.size(); k-- > 0;) {
    T f = a[k + b.size() - 1] / lead;
    for (std::size_t j = 0; j < b.size(); ++j) a[k + j] -= f * b[j];
    a[k + b.size() - 1] = T(0);
    q[k] = std::move(f);
  }
  a.resize(b.size() - 1);
  trim(a);
  return {q, a};
}

/// Monic gcd over an exact field.
inline Coeffs<Rational> gcd(Coeffs<Rational> a, Coeffs<Rational> b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    auto r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty()) {
    const Rational lead = a.back();
    for (auto& c : a) c /= lead;
  }
  return a;
}

inline int sign_of(const Rational& q) { return sgn(q); }
inline int sign_of(const Real& r) { return r.sign(); }

/// Sturm chain p, p', -rem(...), ...  Exact over Rational.
template <class T>
std::vector<Coeffs<T>> sturm_chain(Coeffs<T> p) {
  trim(p);
  std::vector<Coeffs<T>> chain;
  if (p.empty()) return chain;
  chain.push_back(p);
  Coeffs<T> d = derivative(p);
  trim(d);
  while (!d.empty()) {
    chain.push_back(d);
    auto r = divmod(chain[chain.size() - 2], chain.back()).second;
    for (auto& c : r) c = -c;
    d = std::move(r);
  }
  return chain;
}

/// Sign variations of the chain evaluated at x.
template <class T>
int sign_variations(const std::vector<Coeffs<T>>& chain, const T& x) {
  int count = 0, last = 0;
  for (const auto& q : chain) {
    const int s = sign_of(horner(q, x));
    if (s == 0) continue;
    if (last != 0 && s != last) ++count;
    last = s;
  }
  return count;
}

/// Sign variations at +infinity (sign < 0 selects -infinity).
template <class T>
int sign_variations_at_infinity(const std::vector<Coeffs<T>>& chain, int sign) {
  int count = 0, last = 0;
  for (const auto& q : chain) {
    const long d = degree(q);
    if (d < 0) continue;
    int s = sign_of(q[static_cast<std::size_t>(d)]);
    if (sign < 0 && d % 2 == 1) s = -s;
    if (last != 0 && s != last) ++count;
    last = s;
  }
  return count;
}

/// Number of distinct real roots of p.
template <class T>
int count_distinct_real_roots(const Coeffs<T>& p) {
  const auto chain = sturm_chain(p);
  if (chain.empty()) return 0;
  return sign_variations_at_infinity(chain, -1) - sign_variations_at_infinity(chain, +1);
}

/// Cauchy bound: every root z satisfies |z| < bound.
inline Rational root_bound(const Coeffs<Rational>& p) {
  const long d = degree(p);
  Rational m = 0;
  for (long i = 0; i < d; ++i) {
    Rational r = abs(p[static_cast<std::size_t>(i)] / p[static_cast<std::size_t>(d)]);
    if (r > m) m = r;
  }
  return m + 1;
}

}  // namespace biorth::numerics
