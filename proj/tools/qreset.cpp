// Command-line front end: runs the configured reset scenarios and writes
// their CSV/JSON outputs.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "qreset/config.hpp"
#include "qreset/errors.hpp"
#include "qreset/experiments.hpp"

namespace {

struct CommonOptions {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "TOML-style scenario config")->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "output directory")->capture_default_str();
  cmd->add_option("--seed", o.seed, "master seed for noise realizations");
  cmd->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
}

qreset::ScenarioConfig build(const std::string& scenario, const CommonOptions& o) {
  qreset::ScenarioConfig cfg =
      o.config.empty() ? qreset::default_config(scenario) : qreset::load_config(o.config, scenario);
  cfg.output_dir = o.out;
  cfg.threads = o.threads;
  if (o.seed) cfg.noise.seed = *o.seed;
  cfg.validate();
  return cfg;
}

void summarize(const nlohmann::json& j) {
  std::cout << "scenario " << j["scenario"].get<std::string>();
  if (j.contains("final_error")) std::cout << "  final_error " << j["final_error"].get<double>();
  if (j.contains("robustness")) std::cout << "  mean_error " << j["robustness"]["mean_error"].get<double>();
  if (j.contains("rwa")) std::cout << "  full_error " << j["rwa"]["full_error"].get<double>();
  std::cout << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Qubit reset with a memory two-level system: optimal control experiments"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  std::string scenario;
  auto* run = app.add_subcommand("run", "run one scenario");
  run->add_option("scenario", scenario, "scenario id")->required()->check(CLI::IsMember(qreset::scenario_ids()));
  add_common(run, run_opts);

  CommonOptions sweep_opts;
  auto* sweep = app.add_subcommand("sweep", "correlation-strength sweep (speed limit and minimal error)");
  add_common(sweep, sweep_opts);

  CommonOptions rob_opts;
  std::string field_file;
  auto* rob = app.add_subcommand("robustness", "Monte Carlo noise analysis of an optimized field");
  add_common(rob, rob_opts);
  rob->add_option("--field", field_file, "field.csv from an earlier run (skips optimization)")
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    nlohmann::json result;
    if (*run) {
      result = qreset::run_scenario(build(scenario, run_opts));
    } else if (*sweep) {
      result = qreset::run_scenario(build("fig4-sweep", sweep_opts));
    } else {
      const qreset::ScenarioConfig cfg = build("robustness", rob_opts);
      if (field_file.empty()) {
        result = qreset::run_scenario(cfg);
      } else {
        const qreset::ControlField field = qreset::read_field_csv(field_file);
        result = qreset::run_scenario(cfg, &field);
      }
    }
    summarize(result);
  } catch (const qreset::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const qreset::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
