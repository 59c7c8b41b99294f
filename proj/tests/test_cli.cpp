#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "biorth/cli/cli.hpp"

namespace fs = std::filesystem;
using biorth::cli::run;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("biorth-cli-" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("usage errors exit 2 before any computation") {
  CHECK(call({"moments", "--kernel", "no-such-kernel", "--n", "2"}).code == 2);
  CHECK(call({"moments", "--kernel", "{\"type\": \"bogus\"}", "--n", "2"}).code == 2);
  CHECK(call({"polys", "--kernel", "cauchy"}).code == 2);
  CHECK(call({"--bits", "32", "polys", "--kernel", "cauchy", "--degree", "2"}).code == 2);
  CHECK(call({"verify", "cauchy-identity", "--n", "7"}).code == 2);
  CHECK(call({"--format", "csv", "counterexample", "deligne"}).code == 2);
  CHECK(call({"--help"}).code == 0);

  const auto d = scratch_dir("usage");
  const auto target = d / "missing" / "report.json";
  const auto r = call({"--out", target.string(), "polys", "--kernel", "cauchy", "--degree", "2"});
  CHECK(r.code == 2);
  CHECK_FALSE(fs::exists(target));
  CHECK(call({"--out", d.string(), "polys", "--kernel", "cauchy", "--degree", "2"}).code == 2);
}

TEST_CASE("computation errors exit 1 with the kernel and degree") {
  const std::string point = R"({"type": "atomic", "points": [{"x": 0, "y": 0, "mass": 1}]})";
  const auto r = call({"polys", "--kernel", point, "--degree", "2"});
  CHECK(r.code == 1);
  CHECK(r.err.find("degree 2") != std::string::npos);
  CHECK(r.err.find("GramSingular") != std::string::npos);
}

TEST_CASE("reports carry a header and repeat byte for byte") {
  const std::vector<std::string> args{"--seed", "5", "positivity", "--kernel", "weight-iv", "--order", "3", "--samples", "50"};
  const auto a = call(args), b = call(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const auto j = json::parse(a.out);
  CHECK(j["header"]["tool_version"] == biorth::cli::kToolVersion);
  CHECK(j["header"]["bits"] == 256);
  CHECK(j["header"]["seed"] == 5);
  CHECK(j["header"]["kernel_hash"].get<std::string>().size() == 64);
  CHECK(j["report"]["summary"] == "no violation found in 50 samples");
}

TEST_CASE("--out writes the file atomically") {
  const auto d = scratch_dir("out");
  const auto target = d / "zeros.csv";
  const auto r = call({"--out", target.string(), "--format", "csv", "zeros", "--kernel", "cauchy", "--degree", "3"});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(target);
  std::stringstream text;
  text << in.rdbuf();
  CHECK(text.str().rfind("# ", 0) == 0);
  CHECK(text.str().find("# tool_version=") != std::string::npos);
  CHECK(text.str().find("degree,re,im,is_real,in_support\n") != std::string::npos);
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(d)) ++files;
  CHECK(files == 1);
}

TEST_CASE("the counterexample report") {
  const auto r = call({"counterexample", "deligne"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out)["report"];
  CHECK(j["p3"]["polynomial"] == "x^3 + 3/5*x");
  CHECK(j["q3"]["polynomial"] == "x^3 + 48/5*x");
}

TEST_CASE("catalog, moments and polynomial reports") {
  const auto list = call({"kernels", "list"});
  REQUIRE(list.code == 0);
  CHECK(list.out.find("weight-iv") != std::string::npos);
  const auto m = call({"--format", "csv", "moments", "--kernel", "cauchy", "--n", "2"});
  CHECK(m.code == 0);
  const auto p = call({"polys", "--kernel", "weight-iv", "--degree", "4"});
  CHECK(p.code == 0);
  const auto t = call({"transforms", "--kernel", "weight-iv", "--degree", "3"});
  CHECK(t.code == 0);
  const auto z = call({"zeros", "--kernel", "deligne", "--degree", "3"});
  CHECK(z.code == 0);
  CHECK(call({"verify", "cauchy-identity", "--n", "4", "--samples", "20"}).code == 0);
}
