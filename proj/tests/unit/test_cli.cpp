#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "levyou/cli.hpp"
#include "levyou/errors.hpp"

using namespace levyou;
using namespace levyou::cli;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text, "cfg");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("experiment list covers every kind") {
  const auto& l = list_experiments();
  REQUIRE(l.size() == 8);
  for (const char* k : {"subordinator-check", "charfn-test", "ou-sample", "regularity", "blowup", "circle", "burgers",
                        "bounds"}) {
    bool found = false;
    for (const auto& e : l) found = found || (e.kind == k && !e.exercises.empty() && !e.summary.empty());
    CHECK_MESSAGE(found, k);
  }
}

TEST_CASE("syntax errors carry line and column") {
  const auto msg = error_of("{\"experiment\": \"bounds\",\n  \"params\": {\n    \"dt\": ,\n  }\n}");
  CHECK(msg.find("cfg:3:11") == 0);
}

TEST_CASE("unknown and ill-typed fields are rejected with their path") {
  CHECK(error_of(R"({"experiment":"bounds","params":{"instance":3}})").find("params.instance: unknown field") !=
        std::string::npos);
  CHECK(error_of(R"({"experiment":"bounds","extra":1})").find("config.extra: unknown field") != std::string::npos);
  CHECK(error_of(R"({"experiment":"nope"})").find("not one of") != std::string::npos);
  CHECK(error_of(R"({"params":{}})").find("config.experiment") != std::string::npos);
  CHECK(error_of(R"({"experiment":"bounds","params":{"dt":"x"}})").find("params.dt: expected a number") !=
        std::string::npos);
  CHECK(error_of(R"({"experiment":"bounds","params":{"dt":0.3}})").find("params.dt: must divide") != std::string::npos);
  CHECK(error_of(R"({"experiment":"circle","params":{"subordinator":{"kind":"stable","beta":1.5}}})") != "");
  CHECK(error_of(R"({"experiment":"burgers","params":{"noise":{"theta":0.6}}})").find("params.noise.theta") !=
        std::string::npos);
  CHECK(error_of(R"({"experiment":"subordinator-check","seed":-1})").find("config.seed") != std::string::npos);
  CHECK(error_of(R"({"experiment":"subordinator-check","params":{"subordinator":{"kind":"compound-poisson",
              "atoms":[{"size":1,"rate":2,"mass":3}]}}})")
            .find("params.subordinator.atoms[0].mass") != std::string::npos);
}

TEST_CASE("defaults are echoed and the echo parses back to the same run") {
  const auto c = parse_config(R"({"experiment":"subordinator-check","seed":5,
      "params":{"paths":2000,"subordinator":{"kind":"compound-poisson","atoms":[{"size":0.5,"rate":2}]}}})");
  CHECK(c.params["horizon"] == 1.0);
  CHECK(c.params["subordinator"]["atoms"][0]["rate"] == 2.0);
  const auto a = run(c);
  ExperimentConfig again = c;
  again.params = parse_config(json({{"experiment", c.kind}, {"params", c.params}}).dump()).params;
  const auto b = run(again);
  REQUIRE(a.exit_code == Pass);
  CHECK(a.report["results"] == b.report["results"]);
}

TEST_CASE("runs are reproducible and depend on the master seed") {
  auto c = parse_config(R"({"experiment":"charfn-test","seed":11,"params":{"paths":2000,"functionals":2}})");
  const auto a = run(c), b = run(c);
  CHECK(a.report["results"] == b.report["results"]);
  c.master_seed = 12;
  CHECK(run(c).report["results"] != a.report["results"]);
  CHECK(component_seed(c, "paths") != component_seed(c, "functionals"));
}

TEST_CASE("a time step outside the stability region exits with a numeric failure") {
  const auto c = parse_config(R"({"experiment":"bounds","params":{"instances":2,"dt":0.05,"z_scale":40,"g_scale":400}})");
  const auto r = run(c);
  CHECK(r.exit_code == NumericFailure);
  CHECK(!r.message.empty());
  CHECK(r.report["pass"] == false);
}

TEST_CASE("failed assertions exit with 1") {
  // 5 sigma away is impossible with a band of 1e-9 sigma
  const auto c = parse_config(R"({"experiment":"subordinator-check","params":{"paths":200,"sigmas":1e-9}})");
  const auto r = run(c);
  CHECK(r.exit_code == AssertionFailed);
  CHECK(r.report["pass"] == false);
}

TEST_CASE("artifacts are written") {
  const auto dir = std::filesystem::temp_directory_path() / "levyou-cli-test";
  std::filesystem::remove_all(dir);
  const auto c = parse_config(R"({"experiment":"circle","params":{"grids":[64,256]}})");
  write_artifacts(run(c), dir.string());
  CHECK(std::filesystem::exists(dir / "report.json"));
  CHECK(std::filesystem::exists(dir / "circle.csv"));
  std::ifstream in(dir / "circle.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "theta,grid,sup");
  std::filesystem::remove_all(dir);
}
