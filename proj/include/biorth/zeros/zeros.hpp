#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "biorth/numerics/quadrature.hpp"
#include "biorth/system/system.hpp"

namespace biorth::zeros {

using numerics::IntegrationDomain;
using numerics::PrecisionCtx;

enum class Interlacing { Yes, No, NotApplicable };

std::string_view to_string(Interlacing v) noexcept;

struct RootFlags {
  bool is_real = false;
  bool in_support = false;
  /// Roots closer than the separation tolerance share a cluster id.
  std::size_t cluster = 0;
};

struct ZeroReport {
  std::size_t degree = 0;
  long bits = 0;
  std::vector<Complex> roots;
  std::vector<RootFlags> flags;
  bool all_real_simple = false;
  bool all_in_support = false;
  /// Set when the verdict rests on exact Sturm counting and gcd(p, p').
  bool certified = false;
  /// Exact count of distinct real roots (certified reports only).
  std::optional<long> exact_real_count;
  Interlacing interlaces_with_previous = Interlacing::NotApplicable;

  std::size_t real_count() const;
};

/// Roots by Aberth iteration, retried at doubled precision (up to three
/// times) on a stall or when the tolerance verdict disagrees with the exact
/// one.  With
///   tol = 2^(-bits/4):
///   real   |Im z| <= root_imag_tol_scale * tol * (1 + |z|)
///   simple min |z_a - z_b| > root_sep_tol_scale * tol * (1 + max |z|)
/// Exact polynomials get the verdict from Sturm counting and gcd(p, p') = 1.
ZeroReport classify_zeros(const system::MonicPolynomial& poly, const IntegrationDomain& support,
                          const PrecisionCtx& ctx);

/// Strict interlacing of the roots of `lower` (degree j) inside the gaps of
/// `upper` (degree j + 1).  NotApplicable unless both are all real and simple.
Interlacing interlaces(const ZeroReport& lower, const ZeroReport& upper, const PrecisionCtx& ctx);

/// Classified reports for degrees 1..N of one side, with interlacing filled
/// in against the previous degree (degree 1 has none).
std::vector<ZeroReport> zero_reports(const system::BiorthSystem& s, system::Side side, const PrecisionCtx& ctx);

/// Per-degree interlacing verdicts (index j - 1 holds degree j).
std::vector<Interlacing> interlacing_report(const system::BiorthSystem& s, system::Side side,
                                            const PrecisionCtx& ctx);

nlohmann::json to_json(const ZeroReport& r);
/// Columns: degree,re,im,is_real,in_support.
std::string to_csv(const std::vector<ZeroReport>& reports);

}  // namespace biorth::zeros
