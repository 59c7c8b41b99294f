#include "biorth/numerics/real.hpp"

#include <cstdlib>
#include <memory>
#include <stdexcept>
#include <string>

namespace biorth {

namespace {

thread_local long tl_bits = 256;

constexpr mpfr_rnd_t kRnd = MPFR_RNDN;

}  // namespace

long working_bits() noexcept { return tl_bits; }

PrecisionScope::PrecisionScope(long bits) noexcept : saved_(tl_bits) { tl_bits = bits; }
PrecisionScope::~PrecisionScope() { tl_bits = saved_; }

Real::Real(NoInit, long bits) { mpfr_init2(value_, bits); }

Real::Real() : Real(NoInit{}, tl_bits) { mpfr_set_zero(value_, 1); }
Real::Real(int v) : Real(NoInit{}, tl_bits) { mpfr_set_si(value_, v, kRnd); }
Real::Real(long v) : Real(NoInit{}, tl_bits) { mpfr_set_si(value_, v, kRnd); }
Real::Real(unsigned long v) : Real(NoInit{}, tl_bits) { mpfr_set_ui(value_, v, kRnd); }
Real::Real(double v) : Real(NoInit{}, tl_bits) { mpfr_set_d(value_, v, kRnd); }
Real::Real(const Rational& q) : Real(NoInit{}, tl_bits) { mpfr_set_q(value_, q.get_mpq_t(), kRnd); }
Real::Real(const Integer& z) : Real(NoInit{}, tl_bits) { mpfr_set_z(value_, z.get_mpz_t(), kRnd); }

Real Real::parse(std::string_view text) {
  Real r;
  std::string s(text);
  char* end = nullptr;
  if (mpfr_strtofr(r.value_, s.c_str(), &end, 0, kRnd), end == s.c_str() || *end != '\0') {
    throw std::invalid_argument("not a real number: " + s);
  }
  return r;
}

Real::Real(const Real& other) : Real(NoInit{}, other.precision()) { mpfr_set(value_, other.value_, kRnd); }

Real::Real(Real&& other) noexcept : Real(NoInit{}, other.precision()) { mpfr_swap(value_, other.value_); }

Real& Real::operator=(const Real& other) {
  if (this != &other) {
    mpfr_set_prec(value_, mpfr_get_prec(other.value_));
    mpfr_set(value_, other.value_, kRnd);
  }
  return *this;
}

Real& Real::operator=(Real&& other) noexcept {
  mpfr_swap(value_, other.value_);
  return *this;
}

Real::~Real() { mpfr_clear(value_); }

Real Real::rounded() const {
  Real r;
  mpfr_set(r.value_, value_, kRnd);
  return r;
}

// Arithmetic results are produced at the working precision, never below it.
#define BIORTH_BINARY_OP(op, fn)                                 \
  Real& Real::op(const Real& o) {                                \
    if (mpfr_get_prec(value_) < tl_bits) mpfr_prec_round(value_, tl_bits, kRnd); \
    fn(value_, value_, o.value_, kRnd);                          \
    return *this;                                                \
  }
BIORTH_BINARY_OP(operator+=, mpfr_add)
BIORTH_BINARY_OP(operator-=, mpfr_sub)
BIORTH_BINARY_OP(operator*=, mpfr_mul)
BIORTH_BINARY_OP(operator/=, mpfr_div)
#undef BIORTH_BINARY_OP

Real Real::operator-() const {
  Real r(*this);
  mpfr_neg(r.value_, r.value_, kRnd);
  return r;
}

std::partial_ordering operator<=>(const Real& a, const Real& b) {
  if (mpfr_unordered_p(a.value_, b.value_)) return std::partial_ordering::unordered;
  const int c = mpfr_cmp(a.value_, b.value_);
  if (c < 0) return std::partial_ordering::less;
  if (c > 0) return std::partial_ordering::greater;
  return std::partial_ordering::equivalent;
}

long Real::exponent() const noexcept {
  if (!mpfr_regular_p(value_)) return mpfr_get_emin();
  return static_cast<long>(mpfr_get_exp(value_));
}

double Real::to_double() const { return mpfr_get_d(value_, kRnd); }

Rational Real::to_rational() const {
  if (!is_finite()) throw std::domain_error("non-finite real has no rational value");
  Rational q;
  mpfr_get_q(q.get_mpq_t(), value_);
  return q;
}

namespace {

std::string take_mpfr_string(char* s) {
  std::string out(s);
  mpfr_free_str(s);
  return out;
}

}  // namespace

std::string Real::to_hex() const {
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%Ra", value_);
  std::string out(buf);
  mpfr_free_str(buf);
  return out;
}

std::string Real::to_decimal(int digits) const {
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%.*Re", digits - 1, value_);
  return take_mpfr_string(buf);
}

#define BIORTH_UNARY_FN(name, fn)   \
  Real name(const Real& x) {        \
    Real r;                         \
    fn(r.raw(), x.raw(), kRnd);     \
    return r;                       \
  }
BIORTH_UNARY_FN(abs, mpfr_abs)
BIORTH_UNARY_FN(sqrt, mpfr_sqrt)
BIORTH_UNARY_FN(exp, mpfr_exp)
BIORTH_UNARY_FN(log, mpfr_log)
BIORTH_UNARY_FN(sin, mpfr_sin)
BIORTH_UNARY_FN(cos, mpfr_cos)
BIORTH_UNARY_FN(sinh, mpfr_sinh)
BIORTH_UNARY_FN(cosh, mpfr_cosh)
BIORTH_UNARY_FN(tanh, mpfr_tanh)
#undef BIORTH_UNARY_FN

Real pow(const Real& x, long n) {
  Real r;
  mpfr_pow_si(r.raw(), x.raw(), n, kRnd);
  return r;
}

Real hypot(const Real& x, const Real& y) {
  Real r;
  mpfr_hypot(r.raw(), x.raw(), y.raw(), kRnd);
  return r;
}

Real ldexp(const Real& x, long e) {
  Real r;
  mpfr_mul_2si(r.raw(), x.raw(), e, kRnd);
  return r;
}

Real pi() {
  Real r;
  mpfr_const_pi(r.raw(), kRnd);
  return r;
}

Real max(const Real& a, const Real& b) { return a < b ? b.rounded() : a.rounded(); }
Real min(const Real& a, const Real& b) { return b < a ? b.rounded() : a.rounded(); }

Real pow2(long e) {
  Real r(1);
  mpfr_mul_2si(r.raw(), r.raw(), e, kRnd);
  return r;
}

Rational parse_rational(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw std::invalid_argument("empty rational");
  const auto dot = s.find('.');
  const auto exp_pos = s.find_first_of("eE");
  if (dot == std::string::npos && exp_pos == std::string::npos) {
    Rational q;
    if (q.set_str(s, 10) != 0) throw std::invalid_argument("not a rational: " + s);
    if (q.get_den() == 0) throw std::invalid_argument("zero denominator: " + s);
    q.canonicalize();
    return q;
  }
  // Finite decimal, optionally with exponent: mantissa digits over a power of ten.
  std::string mantissa = s.substr(0, exp_pos);
  long exp10 = 0;
  if (exp_pos != std::string::npos) {
    char* end = nullptr;
    const std::string e = s.substr(exp_pos + 1);
    exp10 = std::strtol(e.c_str(), &end, 10);
    if (e.empty() || *end != '\0') throw std::invalid_argument("bad exponent: " + s);
  }
  const auto mdot = mantissa.find('.');
  if (mdot != std::string::npos) {
    exp10 -= static_cast<long>(mantissa.size() - mdot - 1);
    mantissa.erase(mdot, 1);
  }
  Integer num;
  if (mantissa.empty() || mantissa == "-" || mantissa == "+" || num.set_str(mantissa[0] == '+' ? mantissa.substr(1) : mantissa, 10) != 0) {
    throw std::invalid_argument("not a decimal: " + s);
  }
  Integer scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
  Rational q = exp10 < 0 ? Rational(num, scale) : Rational(num * scale);
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) { return q.get_str(10); }

Complex& Complex::operator+=(const Complex& o) {
  re += o.re;
  im += o.im;
  return *this;
}

Complex& Complex::operator-=(const Complex& o) {
  re -= o.re;
  im -= o.im;
  return *this;
}

Complex& Complex::operator*=(const Complex& o) {
  Real r = re * o.re - im * o.im;
  im = re * o.im + im * o.re;
  re = std::move(r);
  return *this;
}

Complex& Complex::operator/=(const Complex& o) {
  // Smith's algorithm keeps intermediate magnitudes bounded.
  if (abs(o.re) >= abs(o.im)) {
    const Real ratio = o.im / o.re;
    const Real den = o.re + o.im * ratio;
    Real r = (re + im * ratio) / den;
    im = (im - re * ratio) / den;
    re = std::move(r);
  } else {
    const Real ratio = o.re / o.im;
    const Real den = o.re * ratio + o.im;
    Real r = (re * ratio + im) / den;
    im = (im * ratio - re) / den;
    re = std::move(r);
  }
  return *this;
}

Real abs(const Complex& z) { return hypot(z.re, z.im); }
Complex conj(const Complex& z) { return {z.re, -z.im}; }

}  // namespace biorth
