#include "biorth/kernels/evaluator.hpp"

#include <algorithm>
#include <functional>
#include <mutex>
#include <string>
#include <unordered_map>

#include "biorth/errors.hpp"

namespace biorth::kernels {

using numerics::IntegrationDomain;
using numerics::Matrix;
using numerics::PrecisionCtx;

struct KernelEvaluator::Memo {
  std::mutex mu;
  std::unordered_map<std::string, Real> values;
};

std::string_view to_string(KernelForm form) noexcept {
  switch (form) {
    case KernelForm::ClosedForm: return "closed_form";
    case KernelForm::GaussianReduced: return "gaussian_reduced";
    case KernelForm::QuadratureBacked: return "quadrature_backed";
  }
  return "unknown";
}

KernelEvaluator::KernelEvaluator(WeightSpec spec, KernelForm form, IntegrationDomain xs, IntegrationDomain ys)
    : spec_(std::move(spec)),
      form_(form),
      x_support_(std::move(xs)),
      y_support_(std::move(ys)),
      memo_(std::make_shared<Memo>()) {}

namespace {

std::pair<Rational, Rational> hull(const std::vector<Rational>& pts) {
  auto [lo, hi] = std::minmax_element(pts.begin(), pts.end());
  if (*lo == *hi) return {*lo - Rational(1, 2), *hi + Rational(1, 2)};
  return {*lo, *hi};
}

}  // namespace

KernelEvaluator make_evaluator(const WeightSpec& spec, EvaluatorOptions options) {
  validate(spec);
  const auto line = IntegrationDomain::full_line();
  if (auto ch = as_chain(spec)) {
    KernelForm form = KernelForm::ClosedForm;
    if (ch->all_quadratic() && !options.force_quadrature) {
      form = KernelForm::GaussianReduced;
    } else if (ch->length() > 2) {
      form = KernelForm::QuadratureBacked;
    } else if (options.force_quadrature) {
      form = KernelForm::QuadratureBacked;
    }
    KernelEvaluator ev(spec, form, line, line);
    if (form == KernelForm::GaussianReduced) ev.gaussian_ = endpoint_form(*ch);
    ev.chain_ = std::move(ch);
    return ev;
  }
  if (std::holds_alternative<CauchyExp>(spec)) {
    const auto half = IntegrationDomain::half_line(0, true);
    return KernelEvaluator(spec, KernelForm::ClosedForm, half, half);
  }
  if (std::holds_alternative<SinProduct>(spec)) {
    const auto unit = IntegrationDomain::finite(0, 1);
    return KernelEvaluator(spec, KernelForm::ClosedForm, unit, unit);
  }
  if (std::holds_alternative<AbsDiff>(spec)) {
    const auto sym = IntegrationDomain::finite(-1, 1);
    return KernelEvaluator(spec, KernelForm::ClosedForm, sym, sym);
  }
  const auto& at = std::get<Atomic>(spec);
  std::vector<Rational> xs, ys;
  if (at.diagonal) {
    for (const auto& e : {at.diagonal->first, at.diagonal->second}) {
      xs.push_back(e);
      ys.push_back(e);
    }
  }
  for (const auto& m : at.points) {
    xs.push_back(m.x);
    ys.push_back(m.y);
  }
  auto [xl, xh] = hull(xs);
  auto [yl, yh] = hull(ys);
  return KernelEvaluator(spec, KernelForm::ClosedForm, IntegrationDomain::finite(xl, xh),
                         IntegrationDomain::finite(yl, yh));
}

Real chain_factor(const Chain& chain, std::size_t k, const Real& x, const Real& y) {
  const Real e = chain.potentials[k](x) / 2 + chain.potentials[k + 1](y) / 2 + Real(chain.couplings[k]) * x * y;
  return exp(-e);
}

Real KernelEvaluator::operator()(const Real& x, const Real& y, const PrecisionCtx& ctx) const {
  PrecisionScope scope(ctx.bits());
  switch (spec_.index()) {
    case 0:
    case 1:
      if (form_ == KernelForm::GaussianReduced) return (*gaussian_)({x, y});
      if (form_ == KernelForm::ClosedForm) return chain_factor(*chain_, 0, x, y);
      return chain_value(x, y, ctx);
    case 2: {
      if (x.sign() < 0 || y.sign() < 0) return Real(0);
      const Real s = x + y;
      return exp(-s) / s;
    }
    case 3:
      if (x.sign() < 0 || y.sign() < 0 || x > 1 || y > 1) return Real(0);
      return sin(pi() * x * y);
    case 4:
      if (abs(x) > 1 || abs(y) > 1) return Real(0);
      return abs(x - y);
    default:
      throw Error(ErrorCode::UnsupportedSpec, "atomic weights have no pointwise values");
  }
}

std::vector<Real> KernelEvaluator::y_breakpoints(const Real& x) const {
  if (std::holds_alternative<AbsDiff>(spec_) && abs(x) < 1) return {x};
  return {};
}

Real KernelEvaluator::chain_value(const Real& x, const Real& y, const PrecisionCtx& ctx) const {
  const Chain& ch = *chain_;
  const std::size_t last = ch.length() - 2;
  const std::string suffix = "|" + y.to_hex() + "|" + std::to_string(ctx.bits()) + "|" + ctx.quad_rel_tol().to_hex();

  // G_k(s) = w_k(s, y) for the last factor, else int w_k(s, t) G_{k+1}(t) dt.
  std::function<Real(std::size_t, const Real&)> g = [&](std::size_t k, const Real& s) -> Real {
    if (k == last) return chain_factor(ch, k, s, y);
    const std::string key = std::to_string(k) + "|" + s.to_hex() + suffix;
    {
      std::lock_guard lock(memo_->mu);
      if (auto it = memo_->values.find(key); it != memo_->values.end()) return it->second;
    }
    Real v = numerics::integrate([&](const Real& t) { return chain_factor(ch, k, s, t) * g(k + 1, t); },
                                 IntegrationDomain::full_line(), ctx)
                 .value;
    std::lock_guard lock(memo_->mu);
    memo_->values.emplace(key, v);
    return v;
  };
  return g(0, x);
}

Matrix<Real> kernel_matrix(const KernelEvaluator& ev, const std::vector<Real>& xs, const std::vector<Real>& ys,
                           const PrecisionCtx& ctx) {
  PrecisionScope scope(ctx.bits());
  const std::size_t nx = xs.size(), ny = ys.size();
  Matrix<Real> m(nx, ny);
  if (ev.form() != KernelForm::QuadratureBacked || ev.chain()->length() < 3) {
    for (std::size_t j = 0; j < nx; ++j)
      for (std::size_t k = 0; k < ny; ++k) m(j, k) = ev(xs[j], ys[k], ctx);
    return m;
  }
  const Chain& ch = *ev.chain();
  const std::size_t last = ch.length() - 2;

  // G_k(s)[c] = w_k(s, y_c) for the last factor, else int w_k(s, t) G_{k+1}(t)[c] dt.
  std::function<std::vector<Real>(std::size_t, const Real&)> g = [&](std::size_t k, const Real& s) {
    std::vector<Real> out(ny);
    if (k == last) {
      for (std::size_t c = 0; c < ny; ++c) out[c] = chain_factor(ch, k, s, ys[c]);
      return out;
    }
    return numerics::integrate(
               [&](const Real& t, std::vector<Real>& v) {
                 const Real f = chain_factor(ch, k, s, t);
                 const auto inner = g(k + 1, t);
                 for (std::size_t c = 0; c < ny; ++c) v[c] = f * inner[c];
               },
               ny, IntegrationDomain::full_line(), ctx)
        .value;
  };
  // The outermost interior variable carries every row at once.
  const auto top = numerics::integrate(
      [&](const Real& t, std::vector<Real>& v) {
        const auto inner = g(1, t);
        for (std::size_t j = 0; j < nx; ++j) {
          const Real f = chain_factor(ch, 0, xs[j], t);
          for (std::size_t c = 0; c < ny; ++c) v[j * ny + c] = f * inner[c];
        }
      },
      nx * ny, IntegrationDomain::full_line(), ctx);
  for (std::size_t j = 0; j < nx; ++j)
    for (std::size_t k = 0; k < ny; ++k) m(j, k) = top.value[j * ny + k];
  return m;
}

Real cauchy_det_rhs(const std::vector<Real>& xs, const std::vector<Real>& ys) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::DomainError, what); };
  if (xs.size() != ys.size() || xs.empty()) fail("tuples must be non-empty and of equal length");
  for (const auto* v : {&xs, &ys}) {
    for (std::size_t i = 0; i < v->size(); ++i) {
      if ((*v)[i].sign() < 0) fail("tuple entries must be non-negative");
      if (i > 0 && !((*v)[i - 1] < (*v)[i])) fail("tuples must be strictly ascending");
    }
  }
  const std::size_t n = xs.size();
  Real sum(0), num(1), den(1);
  for (std::size_t j = 0; j < n; ++j) {
    sum += xs[j] + ys[j];
    for (std::size_t k = j + 1; k < n; ++k) num *= (xs[k] - xs[j]) * (ys[k] - ys[j]);
    for (std::size_t k = 0; k < n; ++k) {
      const Real s = xs[j] + ys[k];
      if (s.is_zero()) {
        fail("x_" + std::to_string(j + 1) + " + y_" + std::to_string(k + 1) + " = 0 (singular corner)");
      }
      den *= s;
    }
  }
  return exp(-sum) * num / den;
}

}  // namespace biorth::kernels
