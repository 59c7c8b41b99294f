#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "biorth/errors.hpp"
#include "biorth/kernels/spec.hpp"
#include "biorth/moments/cache.hpp"
#include "biorth/moments/moments.hpp"
#include "support/oracles.hpp"

using namespace biorth;
using namespace biorth::moments;
using kernels::preset;
using numerics::PrecisionCtx;
using oracle::Q;

namespace {

using Poly = std::vector<Q>;

Q integrate_poly(const Poly& p, const Q& a, const Q& b) {
  Q s = 0;
  for (std::size_t k = 0; k < p.size(); ++k) s += p[k] * (oracle::power(b, k + 1) - oracle::power(a, k + 1)) / (k + 1);
  return s;
}

// int_{-1}^{1} int_{-1}^{1} x^i y^j |x - y| dy dx, inner integral done
// symbolically as a polynomial in x.
Q absdiff_moment(long i, long j) {
  Poly inner(static_cast<std::size_t>(j) + 3, Q(0));
  const Q m1j1 = oracle::power(Q(-1), j + 1), m1j2 = oracle::power(Q(-1), j + 2);
  // int_{-1}^{x} y^j (x - y) dy = x (x^{j+1} - (-1)^{j+1})/(j+1) - (x^{j+2} - (-1)^{j+2})/(j+2)
  inner[j + 2] += Q(1, j + 1) - Q(1, j + 2);
  inner[1] -= m1j1 / (j + 1);
  inner[0] += m1j2 / (j + 2);
  // int_{x}^{1} y^j (y - x) dy = (1 - x^{j+2})/(j+2) - x (1 - x^{j+1})/(j+1)
  inner[0] += Q(1, j + 2);
  inner[j + 2] += -Q(1, j + 2) + Q(1, j + 1);
  inner[1] -= Q(1, j + 1);
  Poly full(inner.size() + static_cast<std::size_t>(i), Q(0));
  for (std::size_t k = 0; k < inner.size(); ++k) full[k + i] = inner[k];
  return integrate_poly(full, -1, 1);
}

// Inverse by cofactors with Leibniz minors.
std::vector<std::vector<Q>> inverse(const std::vector<std::vector<Q>>& a) {
  const std::size_t n = a.size();
  const Q d = oracle::leibniz_det(a);
  std::vector<std::vector<Q>> inv(n, std::vector<Q>(n));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      std::vector<std::vector<Q>> minor;
      for (std::size_t i = 0; i < n; ++i) {
        if (i == r) continue;
        std::vector<Q> row;
        for (std::size_t j = 0; j < n; ++j)
          if (j != c) row.push_back(a[i][j]);
        minor.push_back(row);
      }
      inv[c][r] = ((r + c) % 2 ? -1 : 1) * (minor.empty() ? Q(1) : oracle::leibniz_det(minor)) / d;
    }
  return inv;
}

Real rel_err(const Real& got, const Real& want) { return abs(got - want) / abs(want); }

}  // namespace

TEST_CASE("Cauchy moments are i! j! / (i + j + 1)") {
  PrecisionCtx ctx(256);
  const auto m = moment_matrix(kernels::CauchyExp{}, 8, ctx);
  REQUIRE(m.exact());
  CHECK(m.path == MomentPath::Exact);
  for (long i = 0; i <= 8; ++i)
    for (long j = 0; j <= 8; ++j)
      CHECK((*m.rational)(i, j) == oracle::factorial(i) * oracle::factorial(j) / (i + j + 1));
}

TEST_CASE("Deligne moments are exact sums") {
  PrecisionCtx ctx(256);
  const auto m = moment_matrix(preset("deligne").spec, 5, ctx);
  REQUIRE(m.exact());
  for (long i = 0; i <= 5; ++i)
    for (long j = 0; j <= 5; ++j) {
      const long k = i + j;
      const Q diag = k % 2 ? Q(0) : Q(2, k + 1);
      const Q pts = Q(1, 8) * (oracle::power(Q(-2), j) + oracle::power(Q(-1), i) * oracle::power(Q(2), j));
      CHECK((*m.rational)(i, j) == diag + pts);
    }
}

TEST_CASE("|x - y| moments match piecewise polynomial integration") {
  PrecisionCtx ctx(256);
  const auto m = moment_matrix(kernels::AbsDiff{}, 6, ctx);
  REQUIRE(m.exact());
  for (long i = 0; i <= 6; ++i)
    for (long j = 0; j <= 6; ++j) CHECK((*m.rational)(i, j) == absdiff_moment(i, j));
}

TEST_CASE("Gaussian chain moments match the pairing formula") {
  PrecisionCtx ctx(256);
  PrecisionScope s(256);
  SUBCASE("weight (iv), several couplings") {
    for (const char* name : {"weight-iv", "weight-iv-c0.1", "weight-iv-c0.5", "weight-iv-c1.9"}) {
      const auto spec = preset(name).spec;
      const Q c = std::get<kernels::CoupledExp>(spec).c;
      const auto cov = inverse({{Q(2), c}, {c, Q(2)}});
      const auto m = moment_matrix(spec, 6, ctx);
      CHECK(m.path == MomentPath::ScaledExact);
      // Mass 2 pi / sqrt(4 - c^2).
      const Real mass = 2 * pi() / sqrt(Real(Q(4) - c * c));
      for (long i = 0; i <= 6; ++i)
        for (long j = 0; j <= 6; ++j) {
          const Q want = oracle::normal_moment(i, j, 0, 0, cov[0][0], cov[1][1], cov[0][1]);
          if (want == 0) {
            CHECK(m.real(i, j).is_zero());
          } else {
            CHECK(rel_err(m.real(i, j), mass * Real(want)) < pow2(-240));
          }
        }
    }
  }
  SUBCASE("three-variable chain marginal") {
    const auto spec = preset("gauss-chain-p3").spec;
    const std::vector<std::vector<Q>> a{{1, Q(1, 2), 0}, {Q(1, 2), 2, Q(1, 2)}, {0, Q(1, 2), 1}};
    const auto cov = inverse(a);
    const Real mass = pow(sqrt(2 * pi()), 3) / sqrt(Real(oracle::leibniz_det(a)));
    const auto m = moment_matrix(spec, 5, ctx);
    for (long i = 0; i <= 5; ++i)
      for (long j = 0; j <= 5; ++j) {
        const Q want = oracle::normal_moment(i, j, 0, 0, cov[0][0], cov[2][2], cov[0][2]);
        if (want != 0) CHECK(rel_err(m.real(i, j), mass * Real(want)) < pow2(-240));
      }
  }
  SUBCASE("shifted potentials give a mean") {
    // V1 = V2 = 2x^2 + 2x: exponent -(x^2 + x) - (y^2 + y) - xy.
    const kernels::Potential v(std::vector<Rational>{0, 2, 2});
    const kernels::CoupledExp spec{v, v, Rational(1)};
    const std::vector<std::vector<Q>> a{{2, 1}, {1, 2}};
    const auto cov = inverse(a);
    const Q mean = -(cov[0][0] + cov[0][1]);  // -A^{-1} b, b = (1, 1)
    const auto m = moment_matrix(spec, 4, ctx);
    for (long i = 0; i <= 4; ++i)
      for (long j = 0; j <= 4; ++j) {
        const Q want = oracle::normal_moment(i, j, mean, mean, cov[0][0], cov[1][1], cov[0][1]);
        const Q base = oracle::normal_moment(0, 0, mean, mean, cov[0][0], cov[1][1], cov[0][1]);
        CHECK(rel_err(m.real(i, j) / m.real(0, 0), Real(want / base)) < pow2(-240));
      }
  }
}

TEST_CASE("sin(pi x y) moments: series against a Simpson double integral") {
  PrecisionCtx ctx(256);
  const auto m = moment_matrix(kernels::SinProduct{}, 3, ctx);
  CHECK(m.path == MomentPath::Series);
  for (int i = 0; i <= 3; ++i)
    for (int j = 0; j <= 3; ++j) {
      const double ref = oracle::simpson(
          [&](double x) {
            return oracle::simpson([&](double y) { return std::pow(x, i) * std::pow(y, j) * std::sin(M_PI * x * y); }, 0,
                                   1, 200);
          },
          0, 1, 200);
      CHECK(std::abs(m.real(i, j).to_double() - ref) < 1e-10);
    }
}

TEST_CASE("forced quadrature agrees with the closed forms") {
  PrecisionCtx ctx(256);
  PrecisionScope s(256);
  MomentOptions forced;
  forced.force_quadrature = true;
  for (const char* name : {"weight-ii", "weight-iv-c0.5", "weight-i"}) {
    const auto spec = preset(name).spec;
    const auto exact = moment_matrix(spec, 3, ctx);
    const auto quad = moment_matrix(spec, 3, ctx, forced);
    CHECK(quad.path == MomentPath::Quadrature);
    for (std::size_t i = 0; i <= 3; ++i)
      for (std::size_t j = 0; j <= 3; ++j) CHECK(abs(quad.real(i, j) - exact.real(i, j)) < pow2(-100));
  }
}

TEST_CASE("Cauchy quadrature triangle") {
  PrecisionCtx ctx(256);
  PrecisionScope s(256);
  const auto t = quadrature_triangle(kernels::CauchyExp{}, 6, ctx);
  for (long i = 0; i <= 6; ++i)
    for (long j = 0; j <= 6; ++j) {
      if (i + j > 6) {
        CHECK(t(i, j).is_zero());
        continue;
      }
      const Q want = oracle::factorial(i) * oracle::factorial(j) / (i + j + 1);
      CHECK(rel_err(t(i, j), Real(want)) < pow2(-150));
    }
}

TEST_CASE("leading minors") {
  PrecisionCtx ctx(256);
  const auto m = moment_matrix(kernels::CauchyExp{}, 2, ctx);
  const auto g = gram_sequence(m, ctx);
  REQUIRE(g.exact);
  CHECK((*g.exact)[0] == 1);
  CHECK((*g.exact)[1] == Q(1, 12));
  // det [[1,1/2,2/3],[1/2,1/3,1/2],[2/3,1/2,4/5]]
  CHECK((*g.exact)[2] == Q(1, 540));
  CHECK_FALSE(g.first_singular());

  const auto d = decoupled_moment_matrix(preset("weight-iv").spec, 3, ctx);
  const auto gd = gram_sequence(d, ctx);
  REQUIRE(gd.first_singular());
  CHECK(*gd.first_singular() == 1);
}

TEST_CASE("leading minors are non-zero on every hypothesis kernel (property)") {
  PrecisionCtx ctx(256);
  for (const char* name : {"cauchy", "weight-iv", "weight-iv-c0.1", "weight-iv-c1.9", "gauss-chain-p3"}) {
    const auto m = moment_matrix(preset(name).spec, 10, ctx);
    const auto g = gram_sequence(m, ctx);
    CHECK_FALSE(g.first_singular());
    for (const auto& d : g.d) CHECK(d.sign() != 0);
  }
}

TEST_CASE("moment cache round trip") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("biorth-moment-cache-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  PrecisionCtx ctx(256);
  MomentOptions opts;
  opts.cache_dir = dir;
  const auto spec = preset("weight-ii").spec;
  const auto first = moment_matrix(spec, 4, ctx, opts);
  std::size_t files = 0;
  fs::path file;
  for (const auto& e : fs::directory_iterator(dir)) {
    ++files;
    file = e.path();
  }
  REQUIRE(files == 1);
  // A torn trailing append is ignored.
  { std::ofstream(file, std::ios::app) << "{\"i\": 0, \"j\""; }
  const auto second = moment_matrix(spec, 4, ctx, opts);
  CHECK(*second.rational == *first.rational);

  const auto loaded = MomentCache(dir, kernels::kernel_hash(spec), first.bits).load();
  CHECK(loaded.size() == 25);
  CHECK(*loaded.at({2, 3}).rational == (*first.rational)(2, 3));
  fs::remove_all(dir);
}

TEST_CASE("moment errors") {
  PrecisionCtx ctx(256);
  CHECK_THROWS_AS(decoupled_moment_matrix(kernels::CauchyExp{}, 2, ctx), Error);
}
