#include <doctest.h>

#include "biorth/errors.hpp"
#include "biorth/kernels/evaluator.hpp"
#include "biorth/kernels/spec.hpp"
#include "biorth/positivity/positivity.hpp"
#include "support/oracles.hpp"

using namespace biorth;
using namespace biorth::positivity;
using kernels::preset;
using numerics::IntegrationDomain;
using numerics::PrecisionCtx;

TEST_CASE("sample streams are counter based") {
  PrecisionScope sc(256);
  SampleStream a(7, 5), b(7, 5), c(7, 6), d(8, 5);
  const auto wa = a.next_word();
  CHECK(wa == b.next_word());
  CHECK(wa != c.next_word());
  CHECK(wa != d.next_word());
  // Drawing other samples first does not disturb sample 5.
  SampleStream e(7, 4);
  e.normal();
  SampleStream f(7, 5);
  SampleStream g(7, 5);
  CHECK(f.uniform() == g.uniform());
}

TEST_CASE("draws respect the support") {
  PrecisionScope sc(256);
  double sum = 0;
  for (std::uint64_t s = 0; s < 400; ++s) {
    SampleStream rng(3, s);
    const Real u = rng.uniform();
    CHECK(u >= 0);
    CHECK(u < 1);
    sum += u.to_double();
    const auto xs = rng.ascending(IntegrationDomain::finite(-1, 1), 4);
    for (std::size_t k = 0; k < xs.size(); ++k) {
      CHECK(abs(xs[k]) <= 1);
      if (k) CHECK(xs[k - 1] < xs[k]);
    }
    for (const auto& x : rng.ascending(IntegrationDomain::half_line(0), 3)) CHECK(x >= 0);
  }
  CHECK(std::abs(sum / 400 - 0.5) < 0.05);
}

TEST_CASE("expected sign of sign-regular chains") {
  const auto iv = preset("weight-iv").spec;
  CHECK(expected_sign(iv, 1) == 1);
  CHECK(expected_sign(iv, 2) == -1);
  CHECK(expected_sign(iv, 3) == -1);
  CHECK(expected_sign(iv, 4) == 1);
  CHECK(expected_sign(iv, 5) == 1);
  // Two positive couplings cancel.
  CHECK(expected_sign(preset("gauss-chain-p3").spec, 2) == 1);
  const kernels::Potential v(std::vector<Rational>{0, 0, 2});
  CHECK(expected_sign(kernels::CoupledExp{v, v, Rational(-1)}, 2) == 1);
  CHECK(expected_sign(kernels::CauchyExp{}, 3) == 1);
}

TEST_CASE("weight (iv) determinants have the expected sign") {
  PrecisionCtx ctx(256);
  const auto n1 = sample_positivity(preset("weight-iv").spec, 1, 200, 1, ctx);
  CHECK(n1.violations.empty());
  CHECK(n1.raw_positive == 200);
  const auto n3 = sample_positivity(preset("weight-iv").spec, 3, 1000, 1, ctx);
  CHECK(n3.violations.empty());
  CHECK(n3.min_det > 0);
}

TEST_CASE("chain-family kernels and a convolution show no violations (property)") {
  PrecisionCtx ctx(256);
  const kernels::WeightSpec conv = kernels::convolve(preset("weight-iv").spec, preset("weight-iv-c0.5").spec);
  for (const auto& spec : {preset("weight-iv-c0.1").spec, preset("weight-iv-c1.9").spec, preset("gauss-chain-p3").spec,
                           preset("quartic-coupled").spec, conv}) {
    for (std::size_t n = 1; n <= 5; ++n) {
      const auto r = sample_positivity(spec, n, 100, 11, ctx);
      CHECK_MESSAGE(r.violations.empty(), kernels::type_name(spec), " n=", n);
    }
  }
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto r = sample_positivity(preset("quartic-chain-p3").spec, n, 20, 11, ctx);
    CHECK(r.violations.empty());
  }
}

TEST_CASE("|x - y| violations are reported with their determinants") {
  PrecisionCtx ctx(256);
  auto leibniz = [](const PositivitySample& v) {
    const std::size_t n = v.xs.size();
    std::vector<std::vector<double>> m(n, std::vector<double>(n));
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) m[j][k] = std::abs(v.xs[j].to_double() - v.ys[k].to_double());
    return oracle::leibniz_det(m);
  };
  const auto r = sample_positivity(kernels::AbsDiff{}, 2, 200, 2, ctx);
  REQUIRE_FALSE(r.violations.empty());
  CHECK(r.min_det <= 0);
  for (const auto& v : r.violations) {
    const double ref = leibniz(v);
    if (std::abs(ref) > 1e-9) CHECK((ref > 0) == (v.det_value.sign() > 0));
    CHECK_FALSE(v.positive);
  }
  // Order 3: three x on one side of all y make the rows affinely dependent,
  // so det = 0 exactly and the sign is left open.
  const auto r3 = sample_positivity(kernels::AbsDiff{}, 3, 200, 2, ctx);
  REQUIRE_FALSE(r3.inconclusive.empty());
  for (const auto& v : r3.inconclusive) CHECK(std::abs(leibniz(v)) < 1e-12);
  CHECK(to_json(r3)["summary"].get<std::string>().find("inconclusive") != std::string::npos);
}

TEST_CASE("positivity reports are reproducible") {
  PrecisionCtx ctx(256);
  const auto a = to_json(sample_positivity(kernels::AbsDiff{}, 2, 50, 9, ctx)).dump();
  const auto b = to_json(sample_positivity(kernels::AbsDiff{}, 2, 50, 9, ctx)).dump();
  CHECK(a == b);
  CHECK_THROWS_AS(sample_positivity(preset("deligne").spec, 2, 10, 1, ctx), Error);
}

TEST_CASE("Cauchy determinant identity to rounding") {
  PrecisionCtx ctx(256);
  PrecisionScope sc(256);
  for (std::size_t n = 1; n <= 6; ++n) {
    const auto r = cauchy_identity_check(n, 100, 3, ctx);
    CHECK(r.violations.empty());
    REQUIRE(r.max_rel_error);
    CHECK(*r.max_rel_error <= pow2(30 - 256));
  }
  CHECK_THROWS_AS(cauchy_identity_check(7, 1, 1, ctx), Error);
}

TEST_CASE("Binet-Cauchy for Gaussian factors") {
  PrecisionCtx ctx(256);
  PrecisionScope sc(256);
  const auto a = preset("weight-iv").spec, b = preset("weight-iv-c0.5").spec;
  SUBCASE("n = 1") {
    const auto r = binet_cauchy_check(a, b, {Real(0.25)}, {Real(-0.5)}, ctx);
    CHECK(r.rel_error <= ctx.quad_rel_tol());
  }
  SUBCASE("n = 2 at (0, 1), (0, 1)") {
    const auto r = binet_cauchy_check(a, a, {Real(0), Real(1)}, {Real(0), Real(1)}, ctx);
    CHECK(r.rel_error <= Real(1e-20));
    REQUIRE(r.lhs_closed);
    CHECK(abs(*r.lhs_closed - r.rhs) <= Real(1e-20) * abs(r.rhs));
  }
  CHECK_THROWS_AS(binet_cauchy_check(a, b, {Real(1), Real(0)}, {Real(0), Real(1)}, ctx), Error);
}
