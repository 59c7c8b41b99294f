#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "biorth/kernels/spec.hpp"
#include "biorth/numerics/matrix.hpp"
#include "biorth/numerics/precision.hpp"
#include "biorth/numerics/real.hpp"

namespace biorth::moments {

using numerics::Matrix;
using numerics::PrecisionCtx;

/// How a moment was obtained.
///   Exact       rational value (atomic, Cauchy, |x - y| weights)
///   ScaledExact scale * rational, scale the Gaussian normalization (quadratic chains)
///   Series      convergent power series summed to working precision (sin(pi x y))
///   Quadrature  nested numerical integration
enum class MomentPath { Exact, ScaledExact, Series, Quadrature };

std::string_view to_string(MomentPath path) noexcept;

/// Largest i + j handled by the Gaussian (Isserlis) recursion.
inline constexpr std::size_t kMaxGaussianOrder = 40;

struct MomentValue {
  MomentPath path;
  std::optional<Rational> rational;
  std::optional<Real> scale;
  Real value;
};

struct MomentOptions {
  /// Skip closed forms and integrate the kernel numerically.
  bool force_quadrature = false;
  /// Persistent JSON-lines cache; disabled when empty.
  std::optional<std::filesystem::path> cache_dir;
};

struct MomentMatrix {
  std::size_t n = 0;
  std::string kernel_hash;
  long bits = 0;
  MomentPath path = MomentPath::Quadrature;
  bool symmetric_kernel = false;
  /// Entries are scale * rational(i, j) on exact paths (scale = 1 for Exact).
  std::optional<Matrix<Rational>> rational;
  std::optional<Real> scale;
  /// Entries at `bits` precision; always filled.
  Matrix<Real> real;

  bool exact() const noexcept { return rational.has_value(); }
};

/// Leading principal minors D_0..D_n of a moment matrix.
struct GramSequence {
  std::vector<Real> d;
  /// Rational parts on exact paths: D_k = scale^(k+1) * exact[k].
  std::optional<std::vector<Rational>> exact;
  std::vector<bool> singular;

  /// Smallest k with D_k flagged singular.
  std::optional<std::size_t> first_singular() const;
};

/// E[x^i y^j], 0 <= i, j <= n, for a bivariate normal with exact mean and
/// covariance, by the Isserlis recursion
///   E[x^i y^j] = mu_x E[x^(i-1) y^j] + (i-1) S_xx E[x^(i-2) y^j] + j S_xy E[x^(i-1) y^(j-1)].
Matrix<Rational> gaussian_moment_table(const std::vector<Rational>& mean, const Matrix<Rational>& cov, std::size_t n);

/// One moment M_{i,j}.  Throws Error(MomentDiverges) or Error(NonConvergence).
MomentValue moment(const kernels::WeightSpec& spec, std::size_t i, std::size_t j, const PrecisionCtx& ctx,
                   const MomentOptions& options = {});

/// All M_{i,j}, 0 <= i, j <= n, at ctx.for_moments(n) precision.  Nested
/// quadrature runs at tolerance quad_rel_tol / (n+1)^2.
MomentMatrix moment_matrix(const kernels::WeightSpec& spec, std::size_t n, const PrecisionCtx& ctx,
                           const MomentOptions& options = {});

/// Quadrature-path moments M_{i,j} with i + j <= degree at ctx precision;
/// entries beyond the triangle are zero.
Matrix<Real> quadrature_triangle(const kernels::WeightSpec& spec, std::size_t degree, const PrecisionCtx& ctx);

/// Determinants of the leading minors; singular ones are flagged, not thrown.
GramSequence gram_sequence(const MomentMatrix& m, const PrecisionCtx& ctx);

/// Moment matrix of a chain with every coupling set to zero.  The kernel then
/// factors as f(x) g(y), so the matrix has rank one.
MomentMatrix decoupled_moment_matrix(const kernels::WeightSpec& chain_spec, std::size_t n, const PrecisionCtx& ctx);

}  // namespace biorth::moments
