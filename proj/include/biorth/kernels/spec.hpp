#pragma once

// Declarative descriptions of bivariate weight kernels.
//
// All numeric parameters are exact rationals; decimal input such as "0.1" is
// read as 1/10, so Gaussian chains keep an exact moment path.

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "biorth/numerics/polynomial.hpp"
#include "biorth/numerics/real.hpp"

namespace biorth::kernels {

/// Polynomial V(x), ascending coefficients.  Even degree >= 2, positive lead.
class Potential {
 public:
  explicit Potential(std::vector<Rational> coeffs);

  const std::vector<Rational>& coeffs() const noexcept { return coeffs_; }
  long degree() const noexcept { return static_cast<long>(coeffs_.size()) - 1; }
  bool quadratic() const noexcept { return degree() == 2; }
  Real operator()(const Real& x) const;

  friend bool operator==(const Potential&, const Potential&) = default;

 private:
  std::vector<Rational> coeffs_;
};

/// exp[-V1(x)/2 - V2(y)/2 - c x y] on the whole plane.
struct CoupledExp {
  Potential v1;
  Potential v2;
  Rational c;
  friend bool operator==(const CoupledExp&, const CoupledExp&) = default;
};

/// w_1 * w_2 * ... * w_{p-1} with w_k = exp[-V_k(x)/2 - V_{k+1}(y)/2 - c_k x y].
struct Chain {
  std::vector<Potential> potentials;
  std::vector<Rational> couplings;
  std::size_t length() const noexcept { return potentials.size(); }
  bool all_quadratic() const;
  friend bool operator==(const Chain&, const Chain&) = default;
};

/// e^{-x-y}/(x+y) on [0, inf)^2.
struct CauchyExp {
  friend bool operator==(const CauchyExp&, const CauchyExp&) = default;
};

/// sin(pi x y) on [0, 1]^2.
struct SinProduct {
  friend bool operator==(const SinProduct&, const SinProduct&) = default;
};

/// |x - y| on [-1, 1]^2.
struct AbsDiff {
  friend bool operator==(const AbsDiff&, const AbsDiff&) = default;
};

struct PointMass {
  Rational x;
  Rational y;
  Rational mass;
  friend bool operator==(const PointMass&, const PointMass&) = default;
};

/// delta(x - y) on an optional segment [a, b] plus point masses at (x, y).
struct Atomic {
  std::optional<std::pair<Rational, Rational>> diagonal;
  std::vector<PointMass> points;
  friend bool operator==(const Atomic&, const Atomic&) = default;
};

using WeightSpec = std::variant<CoupledExp, Chain, CauchyExp, SinProduct, AbsDiff, Atomic>;

/// Throws Error(InvalidSpec) or Error(NotPositiveDefinite).
void validate(const WeightSpec& spec);

/// CoupledExp as the two-variable chain; Chain unchanged; nullopt otherwise.
std::optional<Chain> as_chain(const WeightSpec& spec);

/// Kernel is invariant under (x, y) -> (y, x).
bool symmetric(const WeightSpec& spec);

/// Short type tag used in JSON ("coupled_exp", "chain", ...).
std::string type_name(const WeightSpec& spec);

nlohmann::json to_json(const WeightSpec& spec);
/// Parses and validates.  Throws Error(InvalidSpec).
WeightSpec spec_from_json(const nlohmann::json& j);

/// Canonical serialization: compact JSON with sorted keys.
std::string canonical(const WeightSpec& spec);
/// Lowercase hex SHA-256 of canonical(spec).
std::string kernel_hash(const WeightSpec& spec);

/// Chain whose kernel is (A * B)(x, y) = int A(x, s) B(s, y) ds.  The shared
/// variable carries the average of the two meeting potentials, so that each
/// side contributes half of it.
Chain convolve(const WeightSpec& a, const WeightSpec& b);

/// Sub-chain of variables first..last (0-based, inclusive), last > first.
Chain subchain(const Chain& chain, std::size_t first, std::size_t last);

struct Preset {
  std::string name;
  std::string description;
  WeightSpec spec;
};

const std::vector<Preset>& presets();
/// Throws Error(InvalidSpec) for unknown names.
const Preset& preset(const std::string& name);

}  // namespace biorth::kernels
