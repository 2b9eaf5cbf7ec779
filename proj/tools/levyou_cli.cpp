#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "levyou/cli.hpp"
#include "levyou/errors.hpp"

int main(int argc, char** argv) {
  namespace cli = levyou::cli;
  CLI::App app{"Run a levyou experiment from a JSON config"};
  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  int threads = 0;
  bool list = false;
  auto* cfg_opt = app.add_option("-c,--config", config_path, "experiment config (JSON)");
  auto* seed_opt = app.add_option("-s,--seed", seed, "master seed, overrides the config");
  auto* thr_opt = app.add_option("-t,--threads", threads, "worker threads, overrides the config")->check(CLI::NonNegativeNumber);
  auto* out_opt = app.add_option("-o,--out", out_dir, "output directory, overrides the config");
  app.add_flag("--list", list, "list experiment kinds and exit");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cli::InvalidConfig;
  }

  if (list) {
    for (const auto& e : cli::list_experiments())
      std::cout << e.kind << "\t" << e.exercises << "\t" << e.summary << "\n";
    return 0;
  }
  if (!*cfg_opt) {
    std::cerr << "error: --config is required (or use --list)\n";
    return cli::InvalidConfig;
  }

  cli::ExperimentConfig config;
  try {
    config = cli::load_config(config_path);
  } catch (const levyou::ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return cli::InvalidConfig;
  }
  if (*seed_opt) config.master_seed = seed;
  if (*thr_opt) config.threads = threads;
  if (*out_opt) config.out_dir = out_dir;

  const auto result = cli::run(config);
  if (result.exit_code == cli::InvalidConfig) std::cerr << "invalid config: " << result.message << "\n";
  if (result.exit_code == cli::NumericFailure) std::cerr << "numeric failure: " << result.message << "\n";
  for (const auto& a : result.assertions)
    std::cout << (a.pass ? "PASS " : "FAIL ") << a.name << ": " << a.detail << "\n";
  try {
    cli::write_artifacts(result, config.out_dir);
  } catch (const std::exception& e) {
    std::cerr << "cannot write output: " << e.what() << "\n";
    return cli::InvalidConfig;
  }
  std::cout << "report: " << config.out_dir << "/report.json\n";
  return result.exit_code;
}
