#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "qreset/config.hpp"
#include "qreset/krotov.hpp"
#include "qreset/model.hpp"

namespace qreset {

DensityMatrix make_initial_state(const InitialStateSpec& spec, const ModelParams& p);

/// Guess field for the configured grid, model and guess settings.
ControlField make_guess(const GuessSpec& spec, const ModelParams& p, double t_final, int n_steps);

struct OptimizationRun {
  DensityMatrix rho0;
  ControlField guess;
  OptimizationResult result;
};

/// Builds the initial state and guess from the config and runs Krotov.
OptimizationRun run_optimization(const ScenarioConfig& cfg);

/// Seed of realization `index` derived from the master seed (splitmix64),
/// so serial and threaded runs draw identical streams.
std::uint64_t realization_seed(std::uint64_t master, std::uint64_t index);

struct RobustnessResult {
  double noiseless_error = 0.0;
  double mean_error = 0.0;
  double std_error = 0.0;  // sample standard deviation
  std::vector<double> errors;  // one per realization, in index order

  double standard_error() const;
};

/// Monte Carlo estimate of the reset error under noise.
///
/// Amplitude noise scales the field by s ~ N(1, level^2), one draw per
/// realization (or per time step with noise.per_step). State noise draws
/// omega_Q, omega_TLS and beta with relative spread `level`, rebuilds the
/// initial state from them and propagates with the nominal model.
RobustnessResult robustness_monte_carlo(const ControlField& field, const InitialStateSpec& init,
                                        const ModelParams& p, const NoiseSpec& noise,
                                        int threads = 1);

/// Equal-width histogram over [min, max] with columns bin_lo, bin_hi, count.
void write_histogram_csv(std::ostream& os, const std::vector<double>& values, int bins);

struct SweepResult {
  std::vector<double> gammas;
  std::vector<double> mutual_information;
  std::vector<double> min_time;   // NaN when no T up to t_max beats the threshold
  std::vector<double> min_error;  // best optimized error over all probed T
};

/// For each gamma: the smallest T (to the sweep resolution) whose optimized
/// error is below the threshold, and the smallest optimized error seen.
SweepResult correlation_sweep(const ScenarioConfig& cfg);

void write_sweep_csv(std::ostream& os, const SweepResult& sweep);

/// CSV with columns t, epsilon_guess, epsilon sampled at interval midpoints.
void write_field_csv(std::ostream& os, const ControlField& guess, const ControlField& field);

/// Reads the `epsilon` column of a field CSV; T is the last midpoint plus dt/2.
ControlField read_field_csv(const std::filesystem::path& file);

/// Runs one scenario, writes its files into cfg.output_dir and returns the
/// content of result.json. `field` replaces the optimization step of the
/// robustness scenario when given.
nlohmann::json run_scenario(const ScenarioConfig& cfg, const ControlField* field = nullptr);

}  // namespace qreset
