#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "biorth/kernels/spec.hpp"
#include "biorth/numerics/precision.hpp"
#include "biorth/numerics/quadrature.hpp"
#include "biorth/numerics/real.hpp"

namespace biorth::positivity {

using numerics::IntegrationDomain;
using numerics::PrecisionCtx;

/// Counter-based stream: the words for sample s depend only on (seed, s),
/// so samples can be drawn in any order.
class SampleStream {
 public:
  SampleStream(std::uint64_t seed, std::uint64_t sample);

  std::uint64_t next_word();
  /// Uniform on [0, 1) with the working precision's worth of random bits.
  Real uniform();
  /// Standard normal by Box-Muller.
  Real normal();
  /// Uniform on finite domains, a + 2|Z| on half-lines, 2Z on the line.
  Real draw(const IntegrationDomain& d);
  /// n distinct draws, ascending.
  std::vector<Real> ascending(const IntegrationDomain& d, std::size_t n);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

struct PositivitySample {
  std::size_t index = 0;
  std::vector<Real> xs;
  std::vector<Real> ys;
  Real det_value;
  /// sign(det) equals the expected sign.
  bool positive = false;
};

struct PositivityReport {
  std::string kernel;
  std::size_t n = 0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  long bits = 0;
  /// Sign each ascending-tuple determinant must have; see expected_sign.
  int expected_sign = 1;
  /// min over samples of expected_sign * det.
  Real min_det;
  std::vector<PositivitySample> violations;
  /// Samples whose determinant sign could not be settled at up to 8x the
  /// working precision.  Neither violations nor confirmations.
  std::vector<PositivitySample> inconclusive;
  /// Samples whose determinant is literally > 0.
  std::size_t raw_positive = 0;
  std::optional<Real> max_rel_error;
};

/// Sign of det[w(x_j, y_k)] over ascending tuples for a sign-regular kernel.
/// A factor exp(-c x y) is totally positive for c < 0 and, for c > 0,
/// has determinant sign (-1)^(n(n-1)/2) (reverse the y order); chains
/// multiply these.  Non-chain kernels are expected to be totally positive.
int expected_sign(const kernels::WeightSpec& spec, std::size_t n);

/// det[w(x_j, y_k)] over `samples` random ascending tuples.  Determinants
/// flagged singular are retried at doubled precision twice before being
/// recorded as violations.  Throws Error(UnsupportedSpec) for atomic weights.
PositivityReport sample_positivity(const kernels::WeightSpec& spec, std::size_t n, std::size_t samples,
                                   std::uint64_t seed, const PrecisionCtx& ctx);

struct BinetCauchyCheck {
  Real lhs;
  Real rhs;
  Real rel_error;
  /// det of the closed-form convolution when both factors are chains.
  std::optional<Real> lhs_closed;
};

/// det[(A*B)(x_j, y_k)] against
///   (1/n!) int det[A(x_j, s_k)] det[B(s_j, y_k)] ds_1..ds_n,
/// the ordered-simplex integral written over the whole cube.  n <= 3.
BinetCauchyCheck binet_cauchy_check(const kernels::WeightSpec& a, const kernels::WeightSpec& b,
                                    const std::vector<Real>& xs, const std::vector<Real>& ys,
                                    const PrecisionCtx& ctx);

/// det[exp(-x-y)/(x+y)] against its closed form on random non-negative
/// ascending tuples.  n <= 6.
PositivityReport cauchy_identity_check(std::size_t n, std::size_t samples, std::uint64_t seed,
                                       const PrecisionCtx& ctx);

nlohmann::json to_json(const PositivityReport& r);

}  // namespace biorth::positivity
