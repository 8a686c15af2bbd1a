#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qreset/krotov.hpp"
#include "qreset/model.hpp"

namespace qreset {

enum class InitialKind { factorizing, thermal, correlated };

struct InitialStateSpec {
  InitialKind kind = InitialKind::factorizing;
  double gamma = 0.0;  // only for correlated
};

enum class GuessKind { resonant_ramp, delayed_resonance, two_plateau, zero };

struct GuessSpec {
  GuessKind kind = GuessKind::resonant_ramp;
  double t_ramp = 2.0;
  std::optional<double> hold;  // unset: pi / (2 J) - t_ramp
  double delay = 0.0;
  double first_level = 1.0;
  double switch_time = 6.0;
  double off_time = 21.0;
};

enum class NoiseKind { amplitude, state };

struct NoiseSpec {
  NoiseKind kind = NoiseKind::amplitude;
  double level = 0.01;
  int realizations = 1000;
  std::uint64_t seed = 1;
  // Amplitude noise only: a fresh scale factor on every time step instead
  // of one per realization.
  bool per_step = false;
  int histogram_bins = 40;
};

struct SweepSpec {
  std::vector<double> gammas{0.0, -0.02, -0.04, -0.06, -0.08, -0.09};
  double threshold = 0.0474;
  double t_min = 10.0;
  double t_max = 25.0;
  double resolution = 0.25;
  double steps_per_unit_time = 200.0;
};

struct ScenarioConfig {
  std::string scenario;
  ModelParams params;
  double t_final = 25.0;
  int n_steps = 5000;
  KrotovConfig krotov;
  InitialStateSpec initial;
  GuessSpec guess;
  NoiseSpec noise;
  SweepSpec sweep;
  int trajectory_stride = 10;  // rows of trajectory.csv every this many steps
  int threads = 1;
  std::filesystem::path output_dir = ".";

  /// Throws ConfigError on inconsistent settings.
  void validate() const;
};

/// Scenario ids accepted by the runner.
const std::vector<std::string>& scenario_ids();

/// Built-in settings for a scenario id. Throws ConfigError for unknown ids.
ScenarioConfig default_config(const std::string& scenario);

/// Applies a TOML-style document on top of default_config(scenario).
///
/// Supported syntax: `[section]` headers, `key = value` with numbers,
/// booleans, double-quoted strings and flat numeric arrays, `#` comments.
/// A top-level `scenario` key, when present, must agree with `scenario`
/// (or selects it when `scenario` is empty). Unknown keys are errors.
ScenarioConfig parse_config(std::string_view text, const std::string& scenario);

ScenarioConfig load_config(const std::filesystem::path& file, const std::string& scenario);

}  // namespace qreset
