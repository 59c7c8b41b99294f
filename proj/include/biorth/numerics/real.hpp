#pragma once

// Scalar types shared by every module.
//
// Real is a thin value-semantic wrapper over an mpfr_t.  New values are
// created at the calling thread's working precision (see PrecisionScope);
// copies keep the precision of their source.  Rational and Integer are the
// GMP C++ classes.

#include <gmpxx.h>
#include <mpfr.h>

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace biorth {

using Rational = mpq_class;
using Integer = mpz_class;

/// Current working precision (bits) of the calling thread.
long working_bits() noexcept;

/// RAII guard that sets the calling thread's working precision.
class PrecisionScope {
 public:
  explicit PrecisionScope(long bits) noexcept;
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  long saved_;
};

class Real {
 public:
  Real();
  Real(int v);
  Real(long v);
  Real(unsigned long v);
  Real(double v);
  explicit Real(const Rational& q);
  explicit Real(const Integer& z);
  /// Parses decimal or "0x1.8p+3"-style hexadecimal text.
  static Real parse(std::string_view text);

  Real(const Real& other);
  Real(Real&& other) noexcept;
  Real& operator=(const Real& other);
  Real& operator=(Real&& other) noexcept;
  ~Real();

  mpfr_ptr raw() noexcept { return value_; }
  mpfr_srcptr raw() const noexcept { return value_; }
  long precision() const noexcept { return static_cast<long>(mpfr_get_prec(value_)); }

  /// Rounds to the current working precision.
  Real rounded() const;

  Real& operator+=(const Real& o);
  Real& operator-=(const Real& o);
  Real& operator*=(const Real& o);
  Real& operator/=(const Real& o);
  Real operator-() const;

  friend Real operator+(Real a, const Real& b) { return a += b; }
  friend Real operator-(Real a, const Real& b) { return a -= b; }
  friend Real operator*(Real a, const Real& b) { return a *= b; }
  friend Real operator/(Real a, const Real& b) { return a /= b; }

  friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.value_, b.value_) != 0; }
  friend std::partial_ordering operator<=>(const Real& a, const Real& b);

  bool is_zero() const noexcept { return mpfr_zero_p(value_) != 0; }
  bool is_finite() const noexcept { return mpfr_number_p(value_) != 0; }
  int sign() const noexcept { return mpfr_sgn(value_); }
  /// Binary exponent e with 0.5 <= |x|/2^e < 1; very negative for zero.
  long exponent() const noexcept;

  double to_double() const;
  Rational to_rational() const;
  /// Exact hexadecimal form, e.g. "0x1.8p+1"; round-trips through parse().
  std::string to_hex() const;
  /// Decimal scientific form with the given number of significant digits.
  std::string to_decimal(int digits = 20) const;

 private:
  struct NoInit {};
  explicit Real(NoInit, long bits);
  mpfr_t value_;
};

Real abs(const Real& x);
Real sqrt(const Real& x);
Real exp(const Real& x);
Real log(const Real& x);
Real sin(const Real& x);
Real cos(const Real& x);
Real sinh(const Real& x);
Real cosh(const Real& x);
Real tanh(const Real& x);
Real pow(const Real& x, long n);
Real hypot(const Real& x, const Real& y);
Real ldexp(const Real& x, long e);
Real pi();
Real max(const Real& a, const Real& b);
Real min(const Real& a, const Real& b);
/// 2^e at working precision.
Real pow2(long e);

/// Exact rational parsed from "p/q", an integer, or a finite decimal ("0.1" is 1/10).
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& q);

/// Complex number over Real, enough for polynomial root finding.
struct Complex {
  Real re;
  Real im;

  Complex() = default;
  Complex(Real r) : re(std::move(r)), im(0) {}
  Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}

  Complex& operator+=(const Complex& o);
  Complex& operator-=(const Complex& o);
  Complex& operator*=(const Complex& o);
  Complex& operator/=(const Complex& o);
  friend Complex operator+(Complex a, const Complex& b) { return a += b; }
  friend Complex operator-(Complex a, const Complex& b) { return a -= b; }
  friend Complex operator*(Complex a, const Complex& b) { return a *= b; }
  friend Complex operator/(Complex a, const Complex& b) { return a /= b; }
  Complex operator-() const { return {-re, -im}; }
};

Real abs(const Complex& z);
Complex conj(const Complex& z);

}  // namespace biorth
