#include <doctest.h>

#include "biorth/kernels/spec.hpp"
#include "biorth/numerics/polynomial.hpp"
#include "biorth/system/system.hpp"
#include "biorth/zeros/zeros.hpp"
#include "support/oracles.hpp"

using namespace biorth;
using namespace biorth::zeros;
using kernels::preset;
using numerics::IntegrationDomain;
using numerics::Coeffs;
using numerics::PrecisionCtx;
using system::MonicPolynomial;

namespace {

MonicPolynomial from_roots(const std::vector<Rational>& roots) {
  Coeffs<Rational> p{Rational(1)};
  for (const auto& r : roots) p = numerics::multiply(p, Coeffs<Rational>{-r, Rational(1)});
  return MonicPolynomial::from_exact(p);
}

}  // namespace

TEST_CASE("the atomic counterexample has complex zeros at degree 3") {
  PrecisionCtx ctx(256);
  PrecisionScope sc(256);
  const auto s = system::build_system(preset("deligne").spec, 3, ctx);
  for (const auto* poly : {&s.p[3], &s.q[3]}) {
    const auto r = classify_zeros(*poly, IntegrationDomain::full_line(), ctx);
    CHECK_FALSE(r.all_real_simple);
    CHECK(r.certified);
    REQUIRE(r.exact_real_count);
    CHECK(*r.exact_real_count == 1);
    CHECK(r.real_count() == 1);
  }
  const auto r = classify_zeros(s.p[3], IntegrationDomain::full_line(), ctx);
  const Real im = sqrt(Real(3) / 5);
  int pair = 0;
  for (const auto& z : r.roots) {
    if (abs(abs(z.im) - im) < pow2(-200) && abs(z.re) < pow2(-200)) ++pair;
  }
  CHECK(pair == 2);
}

TEST_CASE("Cauchy zeros are real, simple and non-negative") {
  PrecisionCtx ctx(256);
  PrecisionScope sc(256);
  const auto s = system::build_system(kernels::CauchyExp{}, 8, ctx);
  const auto reports = zero_reports(s, system::Side::Left, ctx);
  REQUIRE(reports.size() == 8);
  for (const auto& r : reports) {
    CHECK(r.all_real_simple);
    CHECK(r.all_in_support);
    CHECK(r.certified);
    CHECK(r.real_count() == r.degree);
    for (const auto& z : r.roots) CHECK(z.re > 0);
  }
  CHECK(reports[0].interlaces_with_previous == Interlacing::NotApplicable);
}

TEST_CASE("interlacing verdicts are emitted and repeat exactly") {
  PrecisionCtx ctx(256);
  const auto s = system::build_system(preset("weight-iv").spec, 6, ctx);
  const auto a = interlacing_report(s, system::Side::Left, ctx);
  const auto b = interlacing_report(s, system::Side::Left, ctx);
  CHECK(a.size() == 6);
  CHECK(a == b);
}

TEST_CASE("interlacing on hand-built root sets") {
  PrecisionCtx ctx(256);
  const auto line = IntegrationDomain::full_line();
  const auto lo = classify_zeros(from_roots({Rational(0)}), line, ctx);
  const auto hi = classify_zeros(from_roots({Rational(-1), Rational(1)}), line, ctx);
  const auto off = classify_zeros(from_roots({Rational(2)}), line, ctx);
  const auto cx = classify_zeros(MonicPolynomial::from_exact({Rational(1), Rational(0), Rational(1)}), line, ctx);
  CHECK(interlaces(lo, hi, ctx) == Interlacing::Yes);
  CHECK(interlaces(off, hi, ctx) == Interlacing::No);
  CHECK(interlaces(lo, cx, ctx) == Interlacing::NotApplicable);
}

TEST_CASE("repeated and out-of-support roots") {
  PrecisionCtx ctx(256);
  const auto dbl = classify_zeros(from_roots({Rational(1), Rational(1), Rational(-1)}), IntegrationDomain::full_line(), ctx);
  CHECK_FALSE(dbl.all_real_simple);
  CHECK(dbl.certified);
  const auto out = classify_zeros(from_roots({Rational(1, 2), Rational(3)}), IntegrationDomain::finite(0, 1), ctx);
  CHECK(out.all_real_simple);
  CHECK_FALSE(out.all_in_support);
  CHECK(out.flags[0].in_support != out.flags[1].in_support);
}

TEST_CASE("random factored polynomials are classified correctly (property)") {
  PrecisionCtx ctx(256);
  PrecisionScope sc(256);
  oracle::TestRng rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const long n = rng.range(1, 7);
    std::vector<Rational> roots;
    while (static_cast<long>(roots.size()) < n) {
      const Rational r = rng.rational(30, 8);
      if (std::find(roots.begin(), roots.end(), r) == roots.end()) roots.push_back(r);
    }
    auto exact = classify_zeros(from_roots(roots), IntegrationDomain::full_line(), ctx);
    CHECK(exact.all_real_simple);
    CHECK(exact.certified);
    CHECK(exact.real_count() == static_cast<std::size_t>(n));

    // Same polynomial without the exact coefficients.
    const auto exact_poly = from_roots(roots);
    Coeffs<Real> c;
    for (const auto& q : *exact_poly.exact) c.emplace_back(q);
    auto approx = classify_zeros(MonicPolynomial::from_real(c), IntegrationDomain::full_line(), ctx);
    CHECK(approx.all_real_simple);
    CHECK_FALSE(approx.certified);

    // An irreducible quadratic factor breaks reality.
    auto with_pair = *exact_poly.exact;
    with_pair = numerics::multiply(with_pair, Coeffs<Rational>{Rational(rng.range(1, 9)), Rational(0), Rational(1)});
    auto cx = classify_zeros(MonicPolynomial::from_exact(with_pair), IntegrationDomain::full_line(), ctx);
    CHECK_FALSE(cx.all_real_simple);
    CHECK(cx.real_count() == static_cast<std::size_t>(n));
  }
}

TEST_CASE("zero report serialization") {
  PrecisionCtx ctx(256);
  const auto s = system::build_system(kernels::CauchyExp{}, 2, ctx);
  const auto reports = zero_reports(s, system::Side::Left, ctx);
  const auto csv = to_csv(reports);
  CHECK(csv.rfind("degree,re,im,is_real,in_support\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  const auto j = to_json(reports[1]);
  CHECK(j["verdict"]["all_real_simple"] == true);
  CHECK(j["roots"].size() == 2);
}
