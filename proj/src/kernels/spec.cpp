#include "biorth/kernels/spec.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>

#include "biorth/errors.hpp"
#include "biorth/kernels/gaussian.hpp"

namespace biorth::kernels {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidSpec, what); }

template <class... F>
struct Overload : F... {
  using F::operator()...;
};

json rational_json(const Rational& q) { return to_string(q); }

Rational rational_from(const json& j, const char* field) {
  try {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long>());
  } catch (const Error&) {
  }
  invalid(std::string("field '") + field + "' must be a rational string such as \"1/8\" or \"0.1\"");
}

json potential_json(const Potential& v) {
  json arr = json::array();
  for (const auto& c : v.coeffs()) arr.push_back(rational_json(c));
  return arr;
}

Potential potential_from(const json& j) {
  if (!j.is_array()) invalid("potential must be an array of ascending coefficients");
  std::vector<Rational> c;
  for (const auto& e : j) c.push_back(rational_from(e, "potential"));
  return Potential(std::move(c));
}

const json& field(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) invalid(std::string("missing field '") + name + "'");
  return *it;
}

Potential average(const Potential& a, const Potential& b) {
  std::vector<Rational> c(std::max(a.coeffs().size(), b.coeffs().size()), Rational(0));
  for (std::size_t i = 0; i < a.coeffs().size(); ++i) c[i] += a.coeffs()[i] / 2;
  for (std::size_t i = 0; i < b.coeffs().size(); ++i) c[i] += b.coeffs()[i] / 2;
  return Potential(std::move(c));
}

void validate_chain(const Chain& ch) {
  if (ch.potentials.size() < 2) invalid("a chain needs at least two potentials");
  if (ch.couplings.size() + 1 != ch.potentials.size()) {
    invalid("a chain of " + std::to_string(ch.potentials.size()) + " potentials needs " +
            std::to_string(ch.potentials.size() - 1) + " couplings");
  }
  for (std::size_t k = 0; k < ch.couplings.size(); ++k) {
    if (ch.couplings[k] == 0) invalid("coupling c_" + std::to_string(k + 1) + " is zero");
  }
  if (ch.all_quadratic()) chain_reduce(ch);
}

}  // namespace

Potential::Potential(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) {
  numerics::trim(coeffs_);
  const long d = degree();
  if (d < 2 || d % 2 != 0) invalid("potential degree must be even and >= 2, got " + std::to_string(d));
  if (coeffs_.back() <= 0) invalid("potential leading coefficient must be positive");
}

Real Potential::operator()(const Real& x) const {
  Real acc(0);
  for (std::size_t i = coeffs_.size(); i-- > 0;) {
    acc *= x;
    acc += Real(coeffs_[i]);
  }
  return acc;
}

bool Chain::all_quadratic() const {
  return std::all_of(potentials.begin(), potentials.end(), [](const Potential& v) { return v.quadratic(); });
}

std::optional<Chain> as_chain(const WeightSpec& spec) {
  if (const auto* ce = std::get_if<CoupledExp>(&spec)) return Chain{{ce->v1, ce->v2}, {ce->c}};
  if (const auto* ch = std::get_if<Chain>(&spec)) return *ch;
  return std::nullopt;
}

void validate(const WeightSpec& spec) {
  std::visit(Overload{
                 [](const CoupledExp& ce) { validate_chain(Chain{{ce.v1, ce.v2}, {ce.c}}); },
                 [](const Chain& ch) { validate_chain(ch); },
                 [](const Atomic& at) {
                   if (at.diagonal && !(at.diagonal->first < at.diagonal->second)) {
                     invalid("atomic diagonal segment needs a < b");
                   }
                   if (!at.diagonal && at.points.empty()) invalid("atomic weight has no components");
                 },
                 [](const auto&) {},
             },
             spec);
}

bool symmetric(const WeightSpec& spec) {
  return std::visit(Overload{
                        [](const CoupledExp& ce) { return ce.v1 == ce.v2; },
                        [](const Chain& ch) {
                          const std::size_t p = ch.potentials.size();
                          for (std::size_t k = 0; k < p; ++k)
                            if (!(ch.potentials[k] == ch.potentials[p - 1 - k])) return false;
                          for (std::size_t k = 0; k + 1 < p; ++k)
                            if (ch.couplings[k] != ch.couplings[p - 2 - k]) return false;
                          return true;
                        },
                        [](const Atomic& at) {
                          for (const auto& m : at.points) {
                            auto it = std::find_if(at.points.begin(), at.points.end(), [&](const PointMass& o) {
                              return o.x == m.y && o.y == m.x && o.mass == m.mass;
                            });
                            if (it == at.points.end()) return false;
                          }
                          return true;
                        },
                        [](const auto&) { return true; },
                    },
                    spec);
}

std::string type_name(const WeightSpec& spec) {
  static const char* names[] = {"coupled_exp", "chain", "cauchy_exp", "sin_product", "abs_diff", "atomic"};
  return names[spec.index()];
}

json to_json(const WeightSpec& spec) {
  json j = std::visit(Overload{
                          [](const CoupledExp& ce) {
                            return json{{"v1", potential_json(ce.v1)},
                                        {"v2", potential_json(ce.v2)},
                                        {"c", rational_json(ce.c)}};
                          },
                          [](const Chain& ch) {
                            json pots = json::array(), cs = json::array();
                            for (const auto& v : ch.potentials) pots.push_back(potential_json(v));
                            for (const auto& c : ch.couplings) cs.push_back(rational_json(c));
                            return json{{"potentials", pots}, {"couplings", cs}};
                          },
                          [](const Atomic& at) {
                            json pts = json::array();
                            for (const auto& m : at.points) {
                              pts.push_back(json{{"x", rational_json(m.x)},
                                                 {"y", rational_json(m.y)},
                                                 {"mass", rational_json(m.mass)}});
                            }
                            json diag = nullptr;
                            if (at.diagonal) {
                              diag = json::array({rational_json(at.diagonal->first),
                                                  rational_json(at.diagonal->second)});
                            }
                            return json{{"diagonal", diag}, {"points", pts}};
                          },
                          [](const auto&) { return json::object(); },
                      },
                      spec);
  j["type"] = type_name(spec);
  return j;
}

WeightSpec spec_from_json(const json& j) {
  if (!j.is_object()) invalid("weight spec must be a JSON object");
  const std::string type = field(j, "type").get<std::string>();
  WeightSpec spec = CauchyExp{};
  if (type == "coupled_exp") {
    spec = CoupledExp{potential_from(field(j, "v1")), potential_from(field(j, "v2")), rational_from(field(j, "c"), "c")};
  } else if (type == "chain") {
    Chain ch;
    for (const auto& v : field(j, "potentials")) ch.potentials.push_back(potential_from(v));
    for (const auto& c : field(j, "couplings")) ch.couplings.push_back(rational_from(c, "couplings"));
    spec = std::move(ch);
  } else if (type == "cauchy_exp") {
    spec = CauchyExp{};
  } else if (type == "sin_product") {
    spec = SinProduct{};
  } else if (type == "abs_diff") {
    spec = AbsDiff{};
  } else if (type == "atomic") {
    Atomic at;
    if (auto it = j.find("diagonal"); it != j.end() && !it->is_null()) {
      if (!it->is_array() || it->size() != 2) invalid("atomic diagonal must be [a, b]");
      at.diagonal = std::make_pair(rational_from((*it)[0], "diagonal"), rational_from((*it)[1], "diagonal"));
    }
    if (auto it = j.find("points"); it != j.end()) {
      for (const auto& m : *it) {
        at.points.push_back(
            {rational_from(field(m, "x"), "x"), rational_from(field(m, "y"), "y"), rational_from(field(m, "mass"), "mass")});
      }
    }
    spec = std::move(at);
  } else {
    invalid("unknown weight type '" + type + "'");
  }
  validate(spec);
  return spec;
}

std::string canonical(const WeightSpec& spec) { return to_json(spec).dump(); }

std::string kernel_hash(const WeightSpec& spec) {
  const std::string text = canonical(spec);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::InvalidArgument, "SHA-256 digest failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

Chain convolve(const WeightSpec& a, const WeightSpec& b) {
  auto ca = as_chain(a), cb = as_chain(b);
  if (!ca || !cb) throw Error(ErrorCode::UnsupportedSpec, "convolution is defined here for chain weights only");
  Chain out;
  out.potentials.assign(ca->potentials.begin(), ca->potentials.end() - 1);
  out.potentials.push_back(average(ca->potentials.back(), cb->potentials.front()));
  out.potentials.insert(out.potentials.end(), cb->potentials.begin() + 1, cb->potentials.end());
  out.couplings = ca->couplings;
  out.couplings.insert(out.couplings.end(), cb->couplings.begin(), cb->couplings.end());
  validate_chain(out);
  return out;
}

Chain subchain(const Chain& chain, std::size_t first, std::size_t last) {
  if (!(first < last && last < chain.potentials.size())) {
    throw Error(ErrorCode::InvalidArgument, "sub-chain range out of bounds");
  }
  Chain out;
  out.potentials.assign(chain.potentials.begin() + first, chain.potentials.begin() + last + 1);
  out.couplings.assign(chain.couplings.begin() + first, chain.couplings.begin() + last);
  return out;
}

namespace {

Potential monomial(long degree, Rational coeff) {
  std::vector<Rational> c(static_cast<std::size_t>(degree) + 1, Rational(0));
  c.back() = std::move(coeff);
  return Potential(std::move(c));
}

CoupledExp weight_iv(Rational c) { return CoupledExp{monomial(2, 2), monomial(2, 2), std::move(c)}; }

std::vector<Preset> build_presets() {
  std::vector<Preset> out;
  out.push_back({"deligne", "delta(x-y) on [-1,1] plus (1/8)[delta(x-1)delta(y+2) + delta(x+1)delta(y-2)]",
                 Atomic{std::make_pair(Rational(-1), Rational(1)),
                        {{Rational(1), Rational(-2), Rational(1, 8)}, {Rational(-1), Rational(2), Rational(1, 8)}}}});
  out.push_back({"weight-i", "sin(pi x y) on [0,1]^2", SinProduct{}});
  out.push_back({"weight-ii", "|x - y| on [-1,1]^2", AbsDiff{}});
  out.push_back({"weight-iii", "exp(-x-y)/(x+y) on [0,inf)^2", CauchyExp{}});
  out.push_back({"cauchy", "exp(-x-y)/(x+y) on [0,inf)^2 (same as weight-iii)", CauchyExp{}});
  out.push_back({"weight-iv", "exp(-x^2 - y^2 - c x y), c = 1; stored as V1 = V2 = 2x^2", weight_iv(1)});
  out.push_back({"weight-iv-c0.1", "exp(-x^2 - y^2 - c x y), c = 1/10", weight_iv(Rational(1, 10))});
  out.push_back({"weight-iv-c0.5", "exp(-x^2 - y^2 - c x y), c = 1/2", weight_iv(Rational(1, 2))});
  out.push_back({"weight-iv-c1.9", "exp(-x^2 - y^2 - c x y), c = 19/10", weight_iv(Rational(19, 10))});
  out.push_back({"gauss-chain-p3", "three-variable chain, V_k = x^2, c = (1/2, 1/2)",
                 Chain{{monomial(2, 1), monomial(2, 1), monomial(2, 1)}, {Rational(1, 2), Rational(1, 2)}}});
  out.push_back({"quartic-coupled", "exp(-x^4/2 - y^4/2 - c x y), c = 1/10",
                 CoupledExp{monomial(4, 1), monomial(4, 1), Rational(1, 10)}});
  out.push_back({"quartic-chain-p3", "three-variable chain, V_k = x^4, c = (1/10, 1/10)",
                 Chain{{monomial(4, 1), monomial(4, 1), monomial(4, 1)}, {Rational(1, 10), Rational(1, 10)}}});
  return out;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = build_presets();
  return all;
}

const Preset& preset(const std::string& name) {
  for (const auto& p : presets())
    if (p.name == name) return p;
  invalid("unknown kernel preset '" + name + "'");
}

}  // namespace biorth::kernels
