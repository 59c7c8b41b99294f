#include <doctest.h>

#include <cmath>

#include "biorth/errors.hpp"
#include "biorth/kernels/evaluator.hpp"
#include "biorth/kernels/gaussian.hpp"
#include "biorth/kernels/spec.hpp"
#include "support/oracles.hpp"

using namespace biorth;
using namespace biorth::kernels;
using numerics::PrecisionCtx;

namespace {

Potential mono(long d, Rational c) {
  std::vector<Rational> v(static_cast<std::size_t>(d) + 1, Rational(0));
  v.back() = c;
  return Potential(v);
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("potentials must have even degree and positive lead") {
  CHECK(code_of([] { Potential(std::vector<Rational>{0, 0, 0, 1}); }) == ErrorCode::InvalidSpec);
  CHECK(code_of([] { Potential(std::vector<Rational>{0, 0, -1}); }) == ErrorCode::InvalidSpec);
  CHECK_NOTHROW(Potential(std::vector<Rational>{0, 1, 1}));
}

TEST_CASE("quadratic chains must give a positive definite form") {
  // -x^2/2 - y^2/2 - xy is degenerate.
  CHECK(code_of([] { validate(CoupledExp{mono(2, 1), mono(2, 1), Rational(1)}); }) == ErrorCode::NotPositiveDefinite);
  // Reduced matrix [[1,1,0],[1,2,1],[0,1,1]] has determinant zero.
  const Chain bad{{mono(2, 1), mono(2, 1), mono(2, 1)}, {Rational(1), Rational(1)}};
  CHECK(code_of([&] { validate(bad); }) == ErrorCode::NotPositiveDefinite);
  CHECK(code_of([&] { chain_reduce(bad); }) == ErrorCode::NotPositiveDefinite);
  // Quartic growth beats any coupling.
  CHECK_NOTHROW(validate(CoupledExp{mono(4, 1), mono(4, 1), Rational(50)}));
}

TEST_CASE("reduced quadratic form of the catalog chains") {
  const auto iv = chain_reduce(*as_chain(preset("weight-iv").spec));
  CHECK(iv.a(0, 0) == 2);
  CHECK(iv.a(0, 1) == 1);
  CHECK(iv.a(1, 1) == 2);
  const auto p3 = chain_reduce(*as_chain(preset("gauss-chain-p3").spec));
  CHECK(p3.a(0, 0) == 1);
  CHECK(p3.a(1, 1) == 2);
  CHECK(p3.a(2, 2) == 1);
  CHECK(p3.a(0, 1) == Rational(1, 2));
  CHECK(p3.a(0, 2) == 0);
}

TEST_CASE("pointwise values match the defining formulas") {
  PrecisionCtx ctx(128);
  PrecisionScope s(128);
  const Real x(0.375), y(-1.25);
  auto ev = make_evaluator(preset("weight-iv").spec);
  CHECK(abs(ev(x, y, ctx) - exp(-x * x - y * y - x * y)) < pow2(-120));
  auto ce = make_evaluator(CauchyExp{});
  CHECK(abs(ce(Real(1), Real(2), ctx) - exp(Real(-3)) / 3) < pow2(-120));
  CHECK(ce(Real(-1), Real(2), ctx).is_zero());
  auto sp = make_evaluator(SinProduct{});
  CHECK(abs(sp(Real(0.5), Real(0.5), ctx) - sin(pi() / 4)) < pow2(-120));
  auto ad = make_evaluator(AbsDiff{});
  CHECK(ad(Real(0.5), Real(-0.25), ctx) == Real(0.75));
  CHECK_FALSE(make_evaluator(preset("deligne").spec).pointwise());
}

TEST_CASE("Gaussian chain closed form matches a Simpson convolution") {
  PrecisionCtx ctx(128);
  PrecisionScope s(128);
  const auto spec = preset("gauss-chain-p3").spec;
  auto ev = make_evaluator(spec);
  CHECK(ev.form() == KernelForm::GaussianReduced);
  oracle::TestRng rng(7);
  for (int t = 0; t < 10; ++t) {
    const double x = rng.uniform(-2, 2), y = rng.uniform(-2, 2);
    // exp(-x^2/2 - s^2 - y^2/2 - x s/2 - s y/2) integrated over s.
    const double ref = oracle::simpson(
        [&](double t) { return std::exp(-x * x / 2 - t * t - y * y / 2 - 0.5 * x * t - 0.5 * t * y); }, -12, 12);
    CHECK(std::abs(ev(Real(x), Real(y), ctx).to_double() - ref) < 1e-11 * ref);
  }
}

TEST_CASE("quadrature-backed quartic chain matches a Simpson convolution") {
  PrecisionCtx ctx(128);
  PrecisionScope s(128);
  auto ev = make_evaluator(preset("quartic-chain-p3").spec);
  CHECK(ev.form() == KernelForm::QuadratureBacked);
  const double x = 0.3, y = -0.7;
  const double ref = oracle::simpson(
      [&](double t) {
        return std::exp(-std::pow(x, 4) / 2 - std::pow(t, 4) - std::pow(y, 4) / 2 - 0.1 * x * t - 0.1 * t * y);
      },
      -6, 6);
  CHECK(std::abs(ev(Real(x), Real(y), ctx).to_double() - ref) < 1e-11 * ref);

  const std::vector<Real> xs{Real(-0.5), Real(0.25)}, ys{Real(-1), Real(0.125), Real(1.5)};
  const auto m = kernel_matrix(ev, xs, ys, ctx);
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t k = 0; k < 3; ++k) CHECK(abs(m(j, k) - ev(xs[j], ys[k], ctx)) < pow2(-100) * abs(m(j, k)));
}

TEST_CASE("Cauchy determinant closed form") {
  PrecisionScope s(256);
  PrecisionCtx ctx(256);
  auto ev = make_evaluator(CauchyExp{});
  SUBCASE("two by two at (1, 2)") {
    // Direct 2x2 determinant of W: e^-6 (1/(2*4) - 1/9) = e^-6 / 72.
    const auto rhs = cauchy_det_rhs({Real(1), Real(2)}, {Real(1), Real(2)});
    CHECK(abs(rhs - exp(Real(-6)) / 72) < pow2(-250));
  }
  SUBCASE("random tuples against the Leibniz determinant") {
    oracle::TestRng rng(23);
    for (int t = 0; t < 30; ++t) {
      const std::size_t n = static_cast<std::size_t>(rng.range(1, 5));
      std::vector<double> xd, yd;
      for (std::size_t k = 0; k < n; ++k) {
        xd.push_back(rng.uniform(0, 4));
        yd.push_back(rng.uniform(0, 4));
      }
      std::sort(xd.begin(), xd.end());
      std::sort(yd.begin(), yd.end());
      std::vector<Real> xs(xd.begin(), xd.end()), ys(yd.begin(), yd.end());
      std::vector<std::vector<Real>> w(n, std::vector<Real>(n));
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) w[j][k] = ev(xs[j], ys[k], ctx);
      const Real ref = oracle::leibniz_det(w);
      CHECK(abs(cauchy_det_rhs(xs, ys) - ref) < pow2(-150) * abs(ref));
    }
  }
  SUBCASE("domain errors") {
    CHECK_THROWS_AS(cauchy_det_rhs({Real(2), Real(1)}, {Real(1), Real(2)}), Error);
    CHECK_THROWS_AS(cauchy_det_rhs({Real(0)}, {Real(0)}), Error);
    CHECK_THROWS_AS(cauchy_det_rhs({Real(-1)}, {Real(2)}), Error);
  }
}

TEST_CASE("specs survive a JSON round trip and hash stably") {
  for (const auto& p : presets()) {
    const auto back = spec_from_json(to_json(p.spec));
    CHECK(back == p.spec);
    CHECK(kernel_hash(back) == kernel_hash(p.spec));
    CHECK(kernel_hash(p.spec).size() == 64);
  }
  CHECK(kernel_hash(preset("cauchy").spec) == kernel_hash(preset("weight-iii").spec));
  CHECK(kernel_hash(preset("weight-iv").spec) != kernel_hash(preset("weight-iv-c0.5").spec));
  CHECK_THROWS_AS(spec_from_json(nlohmann::json{{"type", "nope"}}), Error);
  CHECK_THROWS_AS(preset("nope"), Error);
}

TEST_CASE("convolution of two weight-(iv) factors") {
  PrecisionCtx ctx(128);
  PrecisionScope s(128);
  const auto a = preset("weight-iv").spec, b = preset("weight-iv-c0.5").spec;
  const Chain c = convolve(a, b);
  CHECK(c.length() == 3);
  auto ev = make_evaluator(c);
  const double x = 0.4, y = -0.9;
  // Each factor carries half of its 2 s^2 potential at the shared variable.
  const double ref = oracle::simpson(
      [&](double t) { return std::exp(-x * x - t * t - x * t) * std::exp(-t * t - y * y - 0.5 * t * y); }, -10, 10);
  CHECK(std::abs(ev(Real(x), Real(y), ctx).to_double() - ref) < 1e-11 * ref);
  CHECK_THROWS_AS(convolve(CauchyExp{}, a), Error);
}

TEST_CASE("symmetry flags") {
  CHECK(symmetric(preset("weight-iv").spec));
  CHECK(symmetric(CauchyExp{}));
  CHECK_FALSE(symmetric(preset("deligne").spec));
}
