#include <doctest.h>

#include "biorth/errors.hpp"
#include "biorth/kernels/spec.hpp"
#include "biorth/system/system.hpp"
#include "support/oracles.hpp"

using namespace biorth;
using namespace biorth::system;
using kernels::preset;
using numerics::Coeffs;
using numerics::PrecisionCtx;
using oracle::Q;

namespace {

std::vector<std::vector<Q>> exact_moments(const moments::MomentMatrix& m) {
  std::vector<std::vector<Q>> out(m.n + 1, std::vector<Q>(m.n + 1));
  for (std::size_t i = 0; i <= m.n; ++i)
    for (std::size_t j = 0; j <= m.n; ++j) out[i][j] = (*m.rational)(i, j);
  return out;
}

std::vector<std::vector<Q>> transpose(const std::vector<std::vector<Q>>& a) {
  std::vector<std::vector<Q>> t(a.size(), std::vector<Q>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) t[j][i] = a[i][j];
  return t;
}

}  // namespace

TEST_CASE("Cauchy polynomials in closed form") {
  PrecisionCtx ctx(256);
  const auto s = build_system(kernels::CauchyExp{}, 3, ctx);
  REQUIRE(s.exact());
  CHECK(*s.p[2].exact == Coeffs<Rational>{Rational(1, 3), Rational(-2), Rational(1)});
  CHECK(*s.p[3].exact == Coeffs<Rational>{Rational(-3, 10), Rational(18, 5), Rational(-9, 2), Rational(1)});
  // Symmetric weight: p_j = q_j.
  for (std::size_t j = 0; j <= 3; ++j) CHECK(*s.p[j].exact == *s.q[j].exact);
  CHECK(s.residual.is_zero());
  CHECK((*s.h_exact)[2] == Q(1, 45));
}

TEST_CASE("Deligne weight: p_3 = x^3 + 3/5 x") {
  PrecisionCtx ctx(256);
  const auto s = build_system(preset("deligne").spec, 3, ctx);
  CHECK(*s.p[2].exact == Coeffs<Rational>{Rational(-11, 27), Rational(0), Rational(1)});
  CHECK(*s.p[3].exact == Coeffs<Rational>{Rational(0), Rational(3, 5), Rational(0), Rational(1)});
  CHECK(*s.q[3].exact == Coeffs<Rational>{Rational(0), Rational(48, 5), Rational(0), Rational(1)});
}

TEST_CASE("Gaussian catalog examples") {
  PrecisionCtx ctx(256);
  PrecisionScope sc(256);
  const auto iv = build_system(preset("weight-iv").spec, 2, ctx);
  CHECK(abs(iv.p[2].real[0] + Real(2) / 3) < pow2(-200));
  const auto ch = build_system(preset("gauss-chain-p3").spec, 2, ctx);
  CHECK(abs(ch.p[2].real[0] + Real(7) / 6) < pow2(-200));
}

TEST_CASE("solved polynomials match a Cramer's-rule oracle (property)") {
  PrecisionCtx ctx(256);
  for (const char* name : {"cauchy", "weight-ii", "deligne"}) {
    const auto s = build_system(preset(name).spec, 4, ctx);
    const auto m = exact_moments(s.moments);
    for (std::size_t n = 1; n <= 4; ++n) {
      CHECK(oracle::cramer_left_poly(m, n) == *s.p[n].exact);
      CHECK(oracle::cramer_left_poly(transpose(m), n) == *s.q[n].exact);
    }
  }
}

TEST_CASE("bi-orthogonality holds on random rational chains (property)") {
  PrecisionCtx ctx(256);
  PrecisionScope sc(256);
  oracle::TestRng rng(41);
  for (int trial = 0; trial < 12; ++trial) {
    // 2 V(x) = a x^2 + b x with a in [2, 4]; couplings small enough for definiteness.
    auto pot = [&] { return kernels::Potential(std::vector<Rational>{0, rng.rational(3, 2), Rational(rng.range(2, 4))}); };
    const Rational c = rng.rational(1, 2);
    if (c == 0) continue;
    const kernels::CoupledExp spec{pot(), pot(), c};
    const auto s = build_system(spec, 5, ctx);
    for (std::size_t j = 0; j <= 5; ++j) CHECK(s.h[j].sign() != 0);
    CHECK(s.residual < pow2(-180) * abs(s.h[0]));
    const auto check = determinant_cross_check(s, ctx);
    CHECK(check.polys_agree);
    CHECK(check.norms_agree);
  }
}

TEST_CASE("determinant formula agrees with the linear solve on the catalog") {
  PrecisionCtx ctx(256);
  for (const auto& p : kernels::presets()) {
    if (p.name == "quartic-chain-p3" || p.name == "quartic-coupled") continue;
    const std::size_t n = p.name == "deligne" ? 3 : 6;
    const auto s = build_system(p.spec, n, ctx);
    const auto check = determinant_cross_check(s, ctx);
    CHECK_MESSAGE(check.polys_agree, p.name);
    CHECK_MESSAGE(check.norms_agree, p.name);
  }
}

TEST_CASE("p_1 from its integral representation") {
  PrecisionCtx ctx(256);
  for (const char* name : {"cauchy", "weight-iv", "weight-ii", "deligne"}) {
    CHECK_MESSAGE(integral_rep_check_n1(preset(name).spec, ctx).ok, name);
  }
}

TEST_CASE("singular Gram sequences raise with the failing degree") {
  PrecisionCtx ctx(256);
  const auto d = moments::decoupled_moment_matrix(preset("gauss-chain-p3").spec, 3, ctx);
  try {
    build_system(preset("gauss-chain-p3").spec, d, ctx);
    FAIL("expected GramSingular");
  } catch (const GramSingularError& e) {
    CHECK(e.degree() == 1);
    CHECK(e.code() == ErrorCode::GramSingular);
  }
}

TEST_CASE("system JSON export") {
  PrecisionCtx ctx(256);
  const auto j = to_json(build_system(kernels::CauchyExp{}, 2, ctx));
  CHECK(j["degree"] == 2);
  CHECK(j["path"] == "exact");
  CHECK(j["p"][2][0]["num"] == "1");
  CHECK(j["p"][2][0]["den"] == "3");
  CHECK(j["h"][2]["den"] == "45");
}
