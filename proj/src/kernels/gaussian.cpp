#include "biorth/kernels/gaussian.hpp"

#include <algorithm>
#include <string>

#include "biorth/errors.hpp"
#include "biorth/numerics/linalg.hpp"

namespace biorth::kernels {

using numerics::Matrix;

namespace {

Real two_pi_power(long half_steps) {
  // (2 pi)^(half_steps / 2)
  const Real two_pi = 2 * pi();
  Real r = pow(two_pi, half_steps / 2);
  if (half_steps % 2 != 0) r *= sqrt(two_pi);
  return r;
}

std::vector<Rational> mat_vec(const Matrix<Rational>& a, const std::vector<Rational>& v) {
  std::vector<Rational> out(a.rows(), Rational(0));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out[i] += a(i, j) * v[j];
  return out;
}

Rational dot(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

bool positive_definite(const Matrix<Rational>& a) {
  for (std::size_t k = 1; k <= a.rows(); ++k)
    if (numerics::determinant(a.leading(k)) <= 0) return false;
  return true;
}

Real GaussianForm::prefactor() const { return two_pi_power(eliminated) / sqrt(Real(eliminated_det)); }

Real GaussianForm::operator()(const std::vector<Real>& xi) const {
  Real q(0);
  for (std::size_t i = 0; i < dim(); ++i) {
    Real row(0);
    for (std::size_t j = 0; j < dim(); ++j) row += Real(a(i, j)) * xi[j];
    q += xi[i] * row;
  }
  Real lin(0);
  for (std::size_t i = 0; i < dim(); ++i) lin += Real(b[i]) * xi[i];
  return prefactor() * exp(-q / 2 - lin - Real(kappa));
}

Rational GaussianForm::log_exponent() const {
  const auto inv = numerics::inverse(a);
  return dot(b, mat_vec(inv, b)) / 2 - kappa;
}

Real GaussianForm::total_mass() const {
  const Rational det = numerics::determinant(a);
  return prefactor() * two_pi_power(static_cast<long>(dim())) / sqrt(Real(det)) * exp(Real(log_exponent()));
}

std::vector<Rational> GaussianForm::mean() const {
  auto m = mat_vec(numerics::inverse(a), b);
  for (auto& v : m) v = -v;
  return m;
}

Matrix<Rational> GaussianForm::covariance() const { return numerics::inverse(a); }

GaussianForm chain_reduce(const Chain& chain) {
  const std::size_t p = chain.potentials.size();
  if (!chain.all_quadratic()) throw Error(ErrorCode::InvalidSpec, "chain_reduce needs quadratic potentials");
  if (chain.couplings.size() + 1 != p) throw Error(ErrorCode::InvalidSpec, "coupling count mismatch");
  GaussianForm f;
  f.a = Matrix<Rational>(p, p);
  f.b.assign(p, Rational(0));
  for (std::size_t k = 0; k + 1 < p; ++k) {
    for (std::size_t v : {k, k + 1}) {
      const auto& c = chain.potentials[v].coeffs();
      f.a(v, v) += c[2];
      f.b[v] += c[1] / 2;
      f.kappa += c[0] / 2;
    }
    f.a(k, k + 1) = chain.couplings[k];
    f.a(k + 1, k) = chain.couplings[k];
  }
  if (!positive_definite(f.a)) {
    throw Error(ErrorCode::NotPositiveDefinite,
                "chain quadratic form is not positive definite (det A = " + to_string(numerics::determinant(f.a)) +
                    "); couplings too large for the moments to exist");
  }
  return f;
}

GaussianForm marginalize(const GaussianForm& form, const std::vector<std::size_t>& keep) {
  std::vector<std::size_t> drop;
  for (std::size_t i = 0; i < form.dim(); ++i)
    if (std::find(keep.begin(), keep.end(), i) == keep.end()) drop.push_back(i);
  if (drop.empty()) return form;

  const std::size_t k = keep.size(), m = drop.size();
  Matrix<Rational> akk(k, k), aki(k, m), aii(m, m);
  std::vector<Rational> bk(k), bi(m);
  for (std::size_t r = 0; r < k; ++r) {
    bk[r] = form.b[keep[r]];
    for (std::size_t s = 0; s < k; ++s) akk(r, s) = form.a(keep[r], keep[s]);
    for (std::size_t s = 0; s < m; ++s) aki(r, s) = form.a(keep[r], drop[s]);
  }
  for (std::size_t r = 0; r < m; ++r) {
    bi[r] = form.b[drop[r]];
    for (std::size_t s = 0; s < m; ++s) aii(r, s) = form.a(drop[r], drop[s]);
  }
  const auto inv = numerics::inverse(aii);

  GaussianForm out;
  out.a = Matrix<Rational>(k, k);
  out.b.assign(k, Rational(0));
  for (std::size_t r = 0; r < k; ++r) {
    // row r of A_KI A_II^-1
    std::vector<Rational> t(m, Rational(0));
    for (std::size_t s = 0; s < m; ++s)
      for (std::size_t u = 0; u < m; ++u) t[s] += aki(r, u) * inv(u, s);
    for (std::size_t c = 0; c < k; ++c) {
      Rational acc = 0;
      for (std::size_t s = 0; s < m; ++s) acc += t[s] * aki(c, s);
      out.a(r, c) = akk(r, c) - acc;
    }
    out.b[r] = bk[r] - dot(t, bi);
  }
  out.kappa = form.kappa - dot(bi, mat_vec(inv, bi)) / 2;
  out.eliminated = form.eliminated + static_cast<long>(m);
  out.eliminated_det = form.eliminated_det * numerics::determinant(aii);
  return out;
}

GaussianForm endpoint_form(const Chain& chain) {
  return marginalize(chain_reduce(chain), {0, chain.potentials.size() - 1});
}

}  // namespace biorth::kernels
