#pragma once

// Independent reference computations for the test suites.  Nothing here
// calls into the library's numerical code paths.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

#include <gmpxx.h>

namespace oracle {

using Q = mpq_class;

/// xorshift64*; deliberately not the generator the library samples with.
class TestRng {
 public:
  explicit TestRng(std::uint64_t seed) : s_(seed * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL) {
    if (s_ == 0) s_ = 1;
  }
  std::uint64_t next() {
    s_ ^= s_ >> 12;
    s_ ^= s_ << 25;
    s_ ^= s_ >> 27;
    return s_ * 0x2545F4914F6CDD1DULL;
  }
  /// Uniform integer in [lo, hi].
  long range(long lo, long hi) { return lo + static_cast<long>(next() % static_cast<std::uint64_t>(hi - lo + 1)); }
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  /// Small rational p/q with |p| <= pmax, 1 <= q <= qmax.
  Q rational(long pmax, long qmax) {
    Q v(range(-pmax, pmax), range(1, qmax));
    v.canonicalize();
    return v;
  }

 private:
  std::uint64_t s_;
};

/// Leibniz expansion over all permutations; fine for n <= 6.
template <class T>
T leibniz_det(const std::vector<std::vector<T>>& a) {
  const std::size_t n = a.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  T total(0);
  do {
    int inversions = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (perm[i] > perm[j]) ++inversions;
    T term(1);
    for (std::size_t i = 0; i < n; ++i) term *= a[i][perm[i]];
    if (inversions % 2) {
      total -= term;
    } else {
      total += term;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

inline Q factorial(long n) {
  Q f(1);
  for (long k = 2; k <= n; ++k) f *= k;
  return f;
}

inline Q double_factorial(long n) {
  Q f(1);
  for (long k = n; k > 1; k -= 2) f *= k;
  return f;
}

inline Q binomial(long n, long k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

inline Q power(const Q& x, long k) {
  Q r(1);
  for (long i = 0; i < k; ++i) r *= x;
  return r;
}

/// E[X^i Y^j] for a centred bivariate normal by counting pairings: k cross
/// pairs, the rest paired within each variable.
inline Q centred_normal_moment(long i, long j, const Q& sxx, const Q& syy, const Q& sxy) {
  Q total(0);
  for (long k = 0; k <= std::min(i, j); ++k) {
    if ((i - k) % 2 || (j - k) % 2) continue;
    total += binomial(i, k) * binomial(j, k) * factorial(k) * double_factorial(i - k - 1) *
             double_factorial(j - k - 1) * power(sxx, (i - k) / 2) * power(syy, (j - k) / 2) * power(sxy, k);
  }
  return total;
}

/// Same with a mean, by binomial expansion of (mx + X)^i (my + Y)^j.
inline Q normal_moment(long i, long j, const Q& mx, const Q& my, const Q& sxx, const Q& syy, const Q& sxy) {
  Q total(0);
  for (long a = 0; a <= i; ++a)
    for (long b = 0; b <= j; ++b)
      total += binomial(i, a) * binomial(j, b) * power(mx, i - a) * power(my, j - b) *
               centred_normal_moment(a, b, sxx, syy, sxy);
  return total;
}

/// Composite Simpson in double precision on [a, b] with 2m panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int m = 2000) {
  const double h = (b - a) / (2 * m);
  double s = f(a) + f(b);
  for (int k = 1; k < 2 * m; ++k) s += f(a + k * h) * (k % 2 ? 4 : 2);
  return s * h / 3;
}

/// Monic p_n solving sum_k a_k M(k, m) = -M(n, m), m < n, by Cramer's rule
/// with Leibniz determinants.
inline std::vector<Q> cramer_left_poly(const std::vector<std::vector<Q>>& moments, std::size_t n) {
  std::vector<std::vector<Q>> a(n, std::vector<Q>(n));
  std::vector<Q> rhs(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t k = 0; k < n; ++k) a[r][k] = moments[k][r];
    rhs[r] = -moments[n][r];
  }
  const Q d = leibniz_det(a);
  std::vector<Q> c(n + 1);
  for (std::size_t k = 0; k < n; ++k) {
    auto ak = a;
    for (std::size_t r = 0; r < n; ++r) ak[r][k] = rhs[r];
    c[k] = leibniz_det(ak) / d;
  }
  c[n] = 1;
  return c;
}

/// Number of sign changes of a double-valued function on a fine grid.
inline int grid_sign_changes(const std::function<double(double)>& f, double a, double b, int points = 20000) {
  int count = 0, last = 0;
  for (int k = 0; k <= points; ++k) {
    const double v = f(a + (b - a) * k / points);
    const int s = (v > 0) - (v < 0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++count;
    last = s;
  }
  return count;
}

}  // namespace oracle
