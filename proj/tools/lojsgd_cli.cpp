// Batch entry point: lojsgd_cli <command> --config <path> --out <dir> [--seed N]
// [--workers N] [--horizon-override N]. Exit status: 0 all checks passed,
// 1 some check failed, 2 config error, 3 I/O error, 4 runtime error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "lojsgd/config.hpp"
#include "lojsgd/experiments.hpp"

int main(int argc, char** argv) {
  using namespace lojsgd;

  CLI::App app{"Monte Carlo convergence checks for SGD with locally certified constants"};
  std::string command;
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> horizon;
  std::size_t workers = default_workers();

  app.add_option("command", command, "Experiment to run")
      ->required()
      ->check(CLI::IsMember(command_names()));
  app.add_option("--config", config_path, "Experiment config (key = value sections)")->required();
  app.add_option("--out", out_dir, "Output directory (overrides run.out_dir)");
  app.add_option("--seed", seed, "Base seed (overrides run.base_seed)");
  app.add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--horizon-override", horizon, "Replace run.horizon")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }

  ExperimentConfig cfg;
  try {
    cfg = parse_config_file(config_path);
    if (seed) cfg.run.base_seed = *seed;
    if (horizon) cfg.run.horizon = *horizon;
    if (out_dir) cfg.run.out_dir = *out_dir;
    if (cfg.run.out_dir.empty()) throw ConfigError("run.out_dir: no output directory (use --out)");
    validate_config(cfg);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIoError;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  }

  const int status = run_command(command, cfg, cfg.run.out_dir, workers, std::cerr);
  std::cout << command << ": "
            << (status == kExitPass ? "pass" : status == kExitChecksFailed ? "fail" : "error")
            << " (" << cfg.run.out_dir << ")\n";
  return status;
}
