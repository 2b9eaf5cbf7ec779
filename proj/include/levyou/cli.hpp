#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace levyou::cli {

using json = nlohmann::json;

enum ExitCode : int { Pass = 0, AssertionFailed = 1, InvalidConfig = 2, NumericFailure = 3 };

struct ExperimentInfo {
  std::string kind;
  std::string exercises;  // the result the experiment checks
  std::string summary;
};
const std::vector<ExperimentInfo>& list_experiments();

struct ExperimentConfig {
  std::string kind;
  std::uint64_t master_seed = 0;
  int threads = 0;  // 0: keep the runtime default
  std::string out_dir = "levyou-out";
  json params = json::object();
};

// Parses and validates a config; every parameter record is checked against the
// preconditions of the module that consumes it. Throws ConfigError with the
// line/column of syntax errors or the dotted path of the offending field.
ExperimentConfig parse_config(std::string_view text, const std::string& origin = "<config>");
ExperimentConfig load_config(const std::string& path);

struct Assertion {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct CsvArtifact {
  std::string name;  // file name inside the output directory
  std::string content;
};

struct RunResult {
  int exit_code = Pass;
  json report;
  std::vector<Assertion> assertions;
  std::vector<CsvArtifact> csv;
  std::string message;  // diagnostics for exit codes 2 and 3
};

// Runs one experiment. Config errors map to exit 2, numeric failures to 3,
// failed assertions to 1.
RunResult run(const ExperimentConfig& config);

// Writes report.json and the CSV artifacts into out_dir (created if missing).
void write_artifacts(const RunResult& result, const std::string& out_dir);

// Seed of a named component: all randomness of an experiment derives from
// master_seed through stream_id({master_seed, tag(kind), tag(component)}).
std::uint64_t component_seed(const ExperimentConfig& config, std::string_view component);

}  // namespace levyou::cli
