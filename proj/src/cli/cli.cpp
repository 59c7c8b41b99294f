#include "biorth/cli/cli.hpp"

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "biorth/errors.hpp"
#include "biorth/kernels/evaluator.hpp"
#include "biorth/kernels/spec.hpp"
#include "biorth/moments/cache.hpp"
#include "biorth/moments/moments.hpp"
#include "biorth/positivity/positivity.hpp"
#include "biorth/system/system.hpp"
#include "biorth/system/transform.hpp"
#include "biorth/zeros/zeros.hpp"

namespace biorth::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using numerics::Coeffs;
using numerics::PrecisionCtx;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string kernel;
  std::size_t degree = 4;
  std::size_t order = 3;
  std::size_t samples = 1000;
  long bits = 256;
  std::uint64_t seed = 1;
  std::string cache_dir;
  std::string out;
  std::string format = "json";
  bool force_quadrature = false;
  std::string kernel_a = "weight-iv";
  std::string kernel_b = "weight-iv-c0.5";
};

// A report is either JSON or CSV text; the header goes on top of both.
struct Report {
  json header;
  json body;
  std::optional<std::string> csv;
  bool violated = false;
};

kernels::WeightSpec resolve_kernel(const std::string& name) {
  if (name.empty()) throw UsageError("--kernel is required");
  try {
    if (name.front() == '{') return kernels::spec_from_json(json::parse(name));
    if (fs::path(name).extension() == ".json" && fs::is_regular_file(name)) {
      std::ifstream in(name);
      return kernels::spec_from_json(json::parse(in));
    }
    return kernels::preset(name).spec;
  } catch (const json::exception& e) {
    throw UsageError("kernel " + name + ": " + e.what());
  } catch (const Error& e) {
    throw UsageError("unknown or invalid kernel " + name + ": " + e.what());
  }
}

// Rejects an unusable --out before any computation starts.
void check_out_path(const std::string& out) {
  if (out.empty()) return;
  const fs::path p(out);
  const fs::path dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw UsageError("output directory " + dir.string() + " does not exist");
  if (fs::is_directory(p, ec)) throw UsageError("output path " + out + " is a directory");
}

void write_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    f << text;
    f.flush();
    if (!f) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("cannot write " + tmp);
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error("cannot move report into " + path);
  }
}

std::string render(const Report& r, const std::string& format) {
  if (format == "csv") {
    std::ostringstream os;
    for (const auto& [k, v] : r.header.items()) os << "# " << k << "=" << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
    os << *r.csv;
    return os.str();
  }
  json doc{{"header", r.header}, {"report", r.body}};
  return doc.dump(2) + "\n";
}

json make_header(const RunConfig& c, const std::optional<kernels::WeightSpec>& spec) {
  return json{{"tool_version", kToolVersion},
              {"kernel_hash", spec ? json(kernels::kernel_hash(*spec)) : json(nullptr)},
              {"bits", c.bits},
              {"seed", c.seed}};
}

moments::MomentOptions moment_options(const RunConfig& c) {
  moments::MomentOptions o;
  o.force_quadrature = c.force_quadrature;
  if (!c.cache_dir.empty()) {
    o.cache_dir = fs::path(c.cache_dir);
  } else {
    o.cache_dir = moments::cache_dir_from_env();
  }
  return o;
}

bool hypothesis_kernel(const kernels::WeightSpec& spec) {
  return kernels::as_chain(spec).has_value() || std::holds_alternative<kernels::CauchyExp>(spec);
}

std::string rational_text(const Rational& q) { return q.get_str(); }

std::string poly_text(const Coeffs<Rational>& c) {
  std::string s;
  for (std::size_t k = c.size(); k-- > 0;) {
    if (c[k] == 0) continue;
    Rational a = c[k];
    if (!s.empty()) {
      s += a < 0 ? " - " : " + ";
      a = abs(a);
    } else if (a < 0) {
      s += "-";
      a = abs(a);
    }
    const bool unit = a == 1 && k > 0;
    if (!unit) s += rational_text(a);
    if (k > 0) {
      if (!unit) s += "*";
      s += k == 1 ? "x" : "x^" + std::to_string(k);
    }
  }
  return s.empty() ? "0" : s;
}

std::string csv_real(const Real& x) { return x.to_decimal(30); }

// ---- subcommands ----

Report cmd_kernels_list(const RunConfig& c) {
  Report r;
  r.header = make_header(c, std::nullopt);
  json types = json::array({
      json{{"type", "coupled_exp"}, {"description", "exp(-V1(x)/2 - V2(y)/2 - c x y) on the line"}},
      json{{"type", "chain"}, {"description", "convolution w_1 * ... * w_{p-1} of coupled-exponential factors"}},
      json{{"type", "cauchy_exp"}, {"description", "exp(-x-y)/(x+y) on [0,inf)^2"}},
      json{{"type", "sin_product"}, {"description", "sin(pi x y) on [0,1]^2"}},
      json{{"type", "abs_diff"}, {"description", "|x - y| on [-1,1]^2"}},
      json{{"type", "atomic"}, {"description", "diagonal delta on a segment plus point masses"}},
  });
  json presets = json::array();
  std::ostringstream csv;
  csv << "name,type,kernel_hash\n";
  for (const auto& p : kernels::presets()) {
    presets.push_back(json{{"name", p.name},
                           {"description", p.description},
                           {"spec", kernels::to_json(p.spec)},
                           {"kernel_hash", kernels::kernel_hash(p.spec)}});
    csv << p.name << "," << kernels::type_name(p.spec) << "," << kernels::kernel_hash(p.spec) << "\n";
  }
  r.body = json{{"types", types}, {"presets", presets}};
  r.csv = csv.str();
  return r;
}

Report cmd_moments(const RunConfig& c) {
  const auto spec = resolve_kernel(c.kernel);
  const PrecisionCtx ctx(c.bits);
  const auto m = moments::moment_matrix(spec, c.degree, ctx, moment_options(c));
  PrecisionScope scope(m.bits);
  const auto g = moments::gram_sequence(m, PrecisionCtx(m.bits));
  Report r;
  r.header = make_header(c, spec);
  json entries = json::array();
  std::ostringstream csv;
  csv << "i,j,value\n";
  for (std::size_t i = 0; i <= m.n; ++i) {
    json row = json::array();
    for (std::size_t j = 0; j <= m.n; ++j) {
      if (m.rational && !m.scale) {
        row.push_back(system::rational_json((*m.rational)(i, j)));
      } else {
        row.push_back(m.real(i, j).to_hex());
      }
      csv << i << "," << j << "," << csv_real(m.real(i, j)) << "\n";
    }
    entries.push_back(row);
  }
  json gram{{"d", json::array()}, {"singular", g.singular}};
  for (const auto& d : g.d) gram["d"].push_back(d.to_hex());
  if (g.exact) {
    gram["exact"] = json::array();
    for (const auto& d : *g.exact) gram["exact"].push_back(system::rational_json(d));
  }
  r.body = json{{"kernel", kernels::to_json(spec)},
                {"n", m.n},
                {"bits", m.bits},
                {"path", std::string(moments::to_string(m.path))},
                {"entries", entries},
                {"gram", gram}};
  if (m.scale) {
    r.body["scale"] = m.scale->to_hex();
    json rat = json::array();
    for (std::size_t i = 0; i <= m.n; ++i) {
      json row = json::array();
      for (std::size_t j = 0; j <= m.n; ++j) row.push_back(system::rational_json((*m.rational)(i, j)));
      rat.push_back(row);
    }
    r.body["rational"] = rat;
  }
  r.csv = csv.str();
  return r;
}

Report cmd_polys(const RunConfig& c) {
  const auto spec = resolve_kernel(c.kernel);
  const PrecisionCtx ctx(c.bits);
  const auto s = system::build_system(spec, c.degree, ctx, moment_options(c));
  const auto check = system::determinant_cross_check(s, ctx);
  Report r;
  r.header = make_header(c, spec);
  r.body = system::to_json(s);
  r.body["kernel"] = kernels::to_json(spec);
  PrecisionScope scope(s.bits);
  r.body["determinant_formula"] = json{{"polys_agree", check.polys_agree},
                                       {"norms_agree", check.norms_agree},
                                       {"max_coeff_distance", check.max_coeff_distance.to_hex()},
                                       {"max_norm_error", check.max_norm_error.to_hex()}};
  std::ostringstream csv;
  csv << "side,degree,power,coefficient\n";
  for (const auto* side : {&s.p, &s.q}) {
    for (std::size_t j = 0; j < side->size(); ++j) {
      const auto& poly = (*side)[j];
      for (std::size_t k = 0; k < poly.real.size(); ++k) {
        csv << (side == &s.p ? "p" : "q") << "," << j << "," << k << ","
            << (poly.exact ? rational_text((*poly.exact)[k]) : csv_real(poly.real[k])) << "\n";
      }
    }
  }
  r.csv = csv.str();
  r.violated = !check.polys_agree || !check.norms_agree;
  return r;
}

Report cmd_zeros(const RunConfig& c) {
  const auto spec = resolve_kernel(c.kernel);
  const PrecisionCtx ctx(c.bits);
  const auto s = system::build_system(spec, c.degree, ctx, moment_options(c));
  Report r;
  r.header = make_header(c, spec);
  r.body = json{{"kernel", kernels::to_json(spec)}, {"degree", c.degree}};
  bool all_good = true;
  for (auto side : {system::Side::Left, system::Side::Right}) {
    const auto reports = zeros::zero_reports(s, side, ctx);
    json list = json::array(), inter = json::array();
    for (const auto& z : reports) {
      list.push_back(zeros::to_json(z));
      inter.push_back(std::string(zeros::to_string(z.interlaces_with_previous)));
      all_good = all_good && z.all_real_simple && z.all_in_support;
    }
    const std::string name = std::string(system::to_string(side));
    r.body[name] = list;
    r.body["interlacing"][name] = inter;
    if (side == system::Side::Left) r.csv = zeros::to_csv(reports);
  }
  r.violated = hypothesis_kernel(spec) && !all_good;
  return r;
}

Report cmd_transforms(const RunConfig& c) {
  const auto spec = resolve_kernel(c.kernel);
  const PrecisionCtx ctx(c.bits);
  const auto s = system::build_system(spec, c.degree, ctx, moment_options(c));
  const std::size_t positions = system::chain_positions(spec);
  const bool chain = kernels::as_chain(spec).has_value();
  Report r;
  r.header = make_header(c, spec);
  json list = json::array();
  std::ostringstream csv;
  csv << "side,i,j,representation,method,sign_changes,touches\n";
  bool ok = true;
  PrecisionScope scope(s.bits);
  for (auto side : {system::Side::Left, system::Side::Right}) {
    for (std::size_t i = 1; i <= positions; ++i) {
      for (std::size_t j = 0; j <= c.degree; ++j) {
        std::optional<system::TransformEvaluator> ev;
        try {
          ev.emplace(system::transform(s, side, i, j, ctx));
        } catch (const Error& e) {
          if (e.code() == ErrorCode::UnsupportedSpec) continue;
          throw;
        }
        const auto sc = system::sign_changes(*ev, ctx);
        json brackets = json::array();
        for (const auto& [a, b] : sc.brackets) brackets.push_back(json::array({a.to_hex(), b.to_hex()}));
        json item{{"side", std::string(system::to_string(side))},
                  {"i", i},
                  {"j", j},
                  {"representation", std::string(system::to_string(ev->rep()))},
                  {"method", std::string(system::to_string(sc.method))},
                  {"sign_changes", sc.count},
                  {"touches", sc.touches},
                  {"brackets", brackets}};
        if (sc.window) item["window"] = json::array({sc.window->first.to_hex(), sc.window->second.to_hex()});
        list.push_back(item);
        csv << system::to_string(side) << "," << i << "," << j << "," << system::to_string(ev->rep()) << ","
            << system::to_string(sc.method) << "," << sc.count << "," << sc.touches << "\n";
        if (sc.count != j) ok = false;
      }
    }
  }
  r.body = json{{"kernel", kernels::to_json(spec)}, {"degree", c.degree}, {"positions", positions}, {"transforms", list}};
  r.csv = csv.str();
  r.violated = chain && !ok;
  return r;
}

Report cmd_positivity(const RunConfig& c) {
  const auto spec = resolve_kernel(c.kernel);
  const PrecisionCtx ctx(c.bits);
  const auto rep = positivity::sample_positivity(spec, c.order, c.samples, c.seed, ctx);
  Report r;
  r.header = make_header(c, spec);
  r.body = positivity::to_json(rep);
  r.body["kernel_spec"] = kernels::to_json(spec);
  r.violated = hypothesis_kernel(spec) && !rep.violations.empty();
  return r;
}

Report cmd_cauchy_identity(const RunConfig& c) {
  const PrecisionCtx ctx(c.bits);
  const auto rep = positivity::cauchy_identity_check(c.order, c.samples, c.seed, ctx);
  Report r;
  r.header = make_header(c, kernels::WeightSpec(kernels::CauchyExp{}));
  r.body = positivity::to_json(rep);
  PrecisionScope scope(c.bits);
  const Real threshold = pow2(30 - c.bits);
  r.body["rel_error_threshold"] = threshold.to_hex();
  r.violated = !rep.violations.empty() || *rep.max_rel_error > threshold;
  return r;
}

Report cmd_binet_cauchy(const RunConfig& c) {
  const auto a = resolve_kernel(c.kernel_a);
  const auto b = resolve_kernel(c.kernel_b);
  const PrecisionCtx ctx(c.bits);
  PrecisionScope scope(c.bits);
  positivity::SampleStream rng(c.seed, 0);
  const auto xs = rng.ascending(kernels::make_evaluator(a).x_support(), c.order);
  const auto ys = rng.ascending(kernels::make_evaluator(b).y_support(), c.order);
  const auto chk = positivity::binet_cauchy_check(a, b, xs, ys, ctx);
  Report r;
  std::optional<kernels::WeightSpec> conv;
  if (kernels::as_chain(a) && kernels::as_chain(b)) conv = kernels::convolve(a, b);
  r.header = make_header(c, conv);
  json jx = json::array(), jy = json::array();
  for (const auto& x : xs) jx.push_back(x.to_hex());
  for (const auto& y : ys) jy.push_back(y.to_hex());
  const Real threshold(1e-15);
  r.body = json{{"kernel_a", kernels::to_json(a)},
                {"kernel_b", kernels::to_json(b)},
                {"n", c.order},
                {"xs", jx},
                {"ys", jy},
                {"lhs", chk.lhs.to_hex()},
                {"rhs", chk.rhs.to_hex()},
                {"rel_error", chk.rel_error.to_hex()},
                {"rel_error_approx", chk.rel_error.to_decimal(6)},
                {"rel_error_threshold", "1e-15"}};
  if (chk.lhs_closed) r.body["lhs_closed_form"] = chk.lhs_closed->to_hex();
  r.violated = chk.rel_error > threshold;
  return r;
}

Report cmd_counterexample(const RunConfig& c) {
  const auto& preset = kernels::preset("deligne");
  const PrecisionCtx ctx(c.bits);
  const auto s = system::build_system(preset.spec, 3, ctx);
  const auto ev = kernels::make_evaluator(preset.spec);
  Report r;
  r.header = make_header(c, preset.spec);
  r.body = json{{"kernel", kernels::to_json(preset.spec)}};
  for (auto [name, poly, support] : {std::tuple{"p3", &s.p[3], &ev.x_support()}, std::tuple{"q3", &s.q[3], &ev.y_support()}}) {
    const auto z = zeros::classify_zeros(*poly, *support, ctx);
    r.body[name] = json{{"polynomial", poly->exact ? poly_text(*poly->exact) : std::string()},
                        {"coefficients", system::coeffs_json(*poly)},
                        {"zeros", zeros::to_json(z)}};
  }
  return r;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Bi-orthogonal polynomial toolkit: moments, polynomials, zeros and positivity checks"};
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--bits", c.bits, "working precision in bits")->check(CLI::Range(64L, 1L << 20));
  app.add_option("--seed", c.seed, "seed for sampled checks");
  app.add_option("--cache-dir", c.cache_dir, "moment cache directory (default $BIORTH_CACHE_DIR)");
  app.add_option("--out", c.out, "write the report here instead of stdout");
  app.add_option("--format", c.format, "report format")->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("--force-quadrature", c.force_quadrature, "integrate moments numerically even when closed forms exist");

  auto* kernels_cmd = app.add_subcommand("kernels", "kernel catalog");
  kernels_cmd->require_subcommand(1);
  auto* list_cmd = kernels_cmd->add_subcommand("list", "list kernel types and presets");

  auto* moments_cmd = app.add_subcommand("moments", "moment matrix and leading minors");
  moments_cmd->add_option("--kernel", c.kernel, "preset name, inline JSON spec, or .json file")->required();
  moments_cmd->add_option("--n", c.degree, "matrix order - 1")->required();

  auto* polys_cmd = app.add_subcommand("polys", "bi-orthogonal polynomials p_j, q_j and norms h_j");
  polys_cmd->add_option("--kernel", c.kernel)->required();
  polys_cmd->add_option("--degree", c.degree)->required();

  auto* zeros_cmd = app.add_subcommand("zeros", "zeros of p_j and q_j with verdicts and interlacing");
  zeros_cmd->add_option("--kernel", c.kernel)->required();
  zeros_cmd->add_option("--degree", c.degree)->required();

  auto* transforms_cmd = app.add_subcommand("transforms", "sign changes of the transforms P_{i,j}, Q_{i,j}");
  transforms_cmd->add_option("--kernel", c.kernel)->required();
  transforms_cmd->add_option("--degree", c.degree)->required();

  auto* positivity_cmd = app.add_subcommand("positivity", "sample det[w(x_j, y_k)] over ascending tuples");
  positivity_cmd->add_option("--kernel", c.kernel)->required();
  positivity_cmd->add_option("--order", c.order)->required()->check(CLI::PositiveNumber);
  positivity_cmd->add_option("--samples", c.samples);

  auto* verify_cmd = app.add_subcommand("verify", "identity checks");
  verify_cmd->require_subcommand(1);
  auto* cauchy_cmd = verify_cmd->add_subcommand("cauchy-identity", "Cauchy determinant identity on random tuples");
  cauchy_cmd->add_option("--n", c.order)->required()->check(CLI::Range(1, 6));
  cauchy_cmd->add_option("--samples", c.samples);
  auto* binet_cmd = verify_cmd->add_subcommand("binet-cauchy", "determinant of a convolution against the factor integral");
  binet_cmd->add_option("--n", c.order)->required()->check(CLI::Range(1, 3));
  binet_cmd->add_option("--kernel-a", c.kernel_a);
  binet_cmd->add_option("--kernel-b", c.kernel_b);

  auto* counter_cmd = app.add_subcommand("counterexample", "worked counterexamples");
  counter_cmd->require_subcommand(1);
  auto* deligne_cmd = counter_cmd->add_subcommand("deligne", "atomic weight whose p_3 has complex zeros");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  std::string context;
  if (!c.kernel.empty()) {
    context = positivity_cmd->parsed() ? " (kernel " + c.kernel + ", order " + std::to_string(c.order) + ")"
                                       : " (kernel " + c.kernel + ", degree " + std::to_string(c.degree) + ")";
  }
  try {
    check_out_path(c.out);
    Report r;
    bool has_csv = true;
    if (list_cmd->parsed()) {
      r = cmd_kernels_list(c);
    } else if (moments_cmd->parsed()) {
      resolve_kernel(c.kernel);
      r = cmd_moments(c);
    } else if (polys_cmd->parsed()) {
      resolve_kernel(c.kernel);
      r = cmd_polys(c);
    } else if (zeros_cmd->parsed()) {
      resolve_kernel(c.kernel);
      r = cmd_zeros(c);
    } else if (transforms_cmd->parsed()) {
      resolve_kernel(c.kernel);
      r = cmd_transforms(c);
    } else if (positivity_cmd->parsed()) {
      has_csv = false;
      resolve_kernel(c.kernel);
      r = cmd_positivity(c);
    } else if (cauchy_cmd->parsed()) {
      has_csv = false;
      r = cmd_cauchy_identity(c);
    } else if (binet_cmd->parsed()) {
      has_csv = false;
      r = cmd_binet_cauchy(c);
    } else if (deligne_cmd->parsed()) {
      has_csv = false;
      r = cmd_counterexample(c);
    }
    if (c.format == "csv" && !(has_csv && r.csv)) throw UsageError("this report has no CSV form");
    const std::string text = render(r, c.format);
    if (c.out.empty()) {
      out << text;
    } else {
      write_atomic(c.out, text);
    }
    if (r.violated) {
      err << "property violation reported" << context << "\n";
      return kPropertyViolation;
    }
    return kOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << context << "\n";
    return kComputationError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << context << "\n";
    return kComputationError;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace biorth::cli
