#pragma once

#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "biorth/kernels/gaussian.hpp"
#include "biorth/kernels/spec.hpp"
#include "biorth/numerics/matrix.hpp"
#include "biorth/numerics/precision.hpp"
#include "biorth/numerics/quadrature.hpp"

namespace biorth::kernels {

enum class KernelForm { ClosedForm, GaussianReduced, QuadratureBacked };

std::string_view to_string(KernelForm form) noexcept;

struct EvaluatorOptions {
  /// Evaluate chains through their defining convolution integrals even when
  /// a Gaussian closed form exists.
  bool force_quadrature = false;
};

/// Pointwise access to a weight kernel.  Immutable after construction apart
/// from an internally locked memo of convolution values; copies share it.
class KernelEvaluator {
 public:
  const WeightSpec& spec() const noexcept { return spec_; }
  KernelForm form() const noexcept { return form_; }
  const numerics::IntegrationDomain& x_support() const noexcept { return x_support_; }
  const numerics::IntegrationDomain& y_support() const noexcept { return y_support_; }

  /// False for atomic weights, which have no pointwise values.
  bool pointwise() const noexcept { return !std::holds_alternative<Atomic>(spec_); }

  /// Reduced two-variable form; set iff form() == GaussianReduced.
  const std::optional<GaussianForm>& gaussian() const noexcept { return gaussian_; }
  /// The chain behind CoupledExp / Chain specs.
  const std::optional<Chain>& chain() const noexcept { return chain_; }

  /// w(x, y) at ctx.bits().  Throws Error(UnsupportedSpec) for atomic weights.
  Real operator()(const Real& x, const Real& y, const numerics::PrecisionCtx& ctx) const;

  /// Interior points of the y-support where y -> w(x, y) is not smooth
  /// (the ridge y = x of |x - y|).  Quadrature splits there.
  std::vector<Real> y_breakpoints(const Real& x) const;

  /// The kernel is singular only at the corner x = y = 0 of the quadrant
  /// (e^{-x-y}/(x+y)); numerical integrals then use s = x + y, u = x / s.
  bool corner_singular() const noexcept { return std::holds_alternative<CauchyExp>(spec_); }

  friend KernelEvaluator make_evaluator(const WeightSpec& spec, EvaluatorOptions options);

 private:
  struct Memo;

  KernelEvaluator(WeightSpec spec, KernelForm form, numerics::IntegrationDomain xs, numerics::IntegrationDomain ys);

  Real chain_value(const Real& x, const Real& y, const numerics::PrecisionCtx& ctx) const;

  WeightSpec spec_;
  KernelForm form_;
  numerics::IntegrationDomain x_support_;
  numerics::IntegrationDomain y_support_;
  std::optional<GaussianForm> gaussian_;
  std::optional<Chain> chain_;
  std::shared_ptr<Memo> memo_;
};

/// Validates the spec and picks the evaluation form.
/// Throws Error(InvalidSpec) or Error(NotPositiveDefinite).
KernelEvaluator make_evaluator(const WeightSpec& spec, EvaluatorOptions options = {});

/// Factor w_k(x, y) = exp[-V_k(x)/2 - V_{k+1}(y)/2 - c_k x y] of a chain (k is 0-based).
Real chain_factor(const Chain& chain, std::size_t k, const Real& x, const Real& y);

/// [w(x_j, y_k)].  Quadrature-backed chains integrate all entries together,
/// one vector integral per interior variable.
numerics::Matrix<Real> kernel_matrix(const KernelEvaluator& ev, const std::vector<Real>& xs,
                                     const std::vector<Real>& ys, const numerics::PrecisionCtx& ctx);

/// exp(-sum(x_j + y_j)) Delta(x) Delta(y) / prod_{j,k} (x_j + y_k), the closed
/// form of det[W(x_j, y_k)] for W = exp(-x-y)/(x+y).
/// Throws Error(DomainError) unless both tuples are strictly ascending,
/// non-negative, equally long, and every x_j + y_k > 0.
Real cauchy_det_rhs(const std::vector<Real>& xs, const std::vector<Real>& ys);

}  // namespace biorth::kernels
