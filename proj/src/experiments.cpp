#include "qreset/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "qreset/correlations.hpp"
#include "qreset/dynamics.hpp"
#include "qreset/errors.hpp"
#include "qreset/geometric.hpp"

namespace qreset {

namespace {

using nlohmann::json;

constexpr int kVolumeSamples = 101;
constexpr double kProtocolTau = 0.1;
constexpr double kProtocolDt = 1e-3;

// Runs body(i) for i in [0, n) on up to `threads` workers. Each index is
// handled by exactly one worker; results go to index-addressed storage.
template <class Body>
void parallel_for(int n, int threads, Body&& body) {
  const int workers = std::clamp(threads, 1, std::max(n, 1));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(workers));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < n; i += workers) body(i);
      } catch (...) {
        failures[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json report_json(const DensityMatrix& rho) {
  const CorrelationReport r = correlation_report(rho);
  return {{"mutual_information", r.mutual_information},
          {"discord", r.discord ? json(*r.discord) : json(nullptr)},
          {"concurrence", r.concurrence}};
}

json params_json(const ModelParams& p) {
  return {{"omega_q", p.omega_q},   {"omega_tls", p.omega_tls}, {"coupling", p.coupling},
          {"kappa", p.kappa},       {"beta", p.beta},           {"rwa", p.rwa},
          {"control", p.control == ControlAxis::z ? "z" : "x"}};
}

const char* initial_name(InitialKind k) {
  switch (k) {
    case InitialKind::factorizing: return "factorizing";
    case InitialKind::thermal: return "thermal";
    case InitialKind::correlated: return "correlated";
  }
  return "?";
}

std::ofstream open_output(const std::filesystem::path& dir, const char* name) {
  std::ofstream out(dir / name);
  if (!out) throw ConfigError("cannot write " + (dir / name).string());
  return out;
}

// Volume of the qubit's dynamical map; only defined for product starts.
json volume_json(const ScenarioConfig& cfg, const ControlField& field, const ModelParams& p) {
  if (cfg.initial.kind != InitialKind::factorizing) return nullptr;
  std::vector<double> times(kVolumeSamples);
  for (int i = 0; i < kVolumeSamples; ++i) times[static_cast<std::size_t>(i)] = field.t_final() * i / (kVolumeSamples - 1);
  const VolumeSeries v = dynamical_map_volume(field, p, thermal_two_level(p.omega_tls, p.beta), times);
  return {{"times", v.times}, {"values", v.volume}};
}

// Shared part of every optimizing scenario: trajectory, field and summary.
json optimization_summary(const ScenarioConfig& cfg, const OptimizationRun& run, const ModelParams& eval_params,
                          const DensityMatrix& eval_rho0) {
  const Trajectory traj = propagate(eval_rho0, run.result.final_field, eval_params, cfg.trajectory_stride);
  {
    auto out = open_output(cfg.output_dir, "trajectory.csv");
    write_trajectory_csv(out, traj);
  }
  {
    auto out = open_output(cfg.output_dir, "field.csv");
    write_field_csv(out, run.guess, run.result.final_field);
  }
  json j;
  j["guess_error"] = run.result.error_history.front();
  j["final_error"] = run.result.final_error();
  j["iterations"] = run.result.iterations();
  j["converged"] = run.result.converged;
  j["error_history"] = run.result.error_history;
  j["min_error_bound"] = min_error_bound(cfg.params);
  j["correlations"] = {{"initial", report_json(eval_rho0)}, {"final", report_json(traj.states.back())}};
  j["volume"] = volume_json(cfg, run.result.final_field, eval_params);
  return j;
}

json robustness_json(const NoiseSpec& noise, const RobustnessResult& r) {
  return {{"kind", noise.kind == NoiseKind::amplitude ? "amplitude" : "state"},
          {"level", noise.level},
          {"realizations", noise.realizations},
          {"seed", noise.seed},
          {"per_step", noise.per_step},
          {"noiseless_error", r.noiseless_error},
          {"mean_error", r.mean_error},
          {"std_error", r.std_error},
          {"standard_error_of_mean", r.standard_error()}};
}

double optimized_error(const ScenarioConfig& base, double gamma, double t_final) {
  ScenarioConfig cfg = base;
  cfg.t_final = t_final;
  cfg.n_steps = std::max(1, static_cast<int>(std::lround(t_final * base.sweep.steps_per_unit_time)));
  cfg.initial = {gamma == 0.0 ? InitialKind::factorizing : InitialKind::correlated, gamma};
  return run_optimization(cfg).result.final_error();
}

}  // namespace

DensityMatrix make_initial_state(const InitialStateSpec& spec, const ModelParams& p) {
  switch (spec.kind) {
    case InitialKind::factorizing: return factorizing_initial_state(p);
    case InitialKind::thermal: return p.rwa ? rwa_joint_thermal_state(p) : joint_thermal_state(p);
    case InitialKind::correlated: return correlated_initial_state(p, spec.gamma);
  }
  throw ConfigError("unknown initial state kind");
}

ControlField make_guess(const GuessSpec& spec, const ModelParams& p, double t_final, int n_steps) {
  try {
    switch (spec.kind) {
      case GuessKind::resonant_ramp:
        return guess_field_resonant_ramp(p, t_final, spec.t_ramp,
                                         spec.hold.value_or(swap_time_min(p.coupling) - spec.t_ramp), n_steps);
      case GuessKind::delayed_resonance:
        return guess_field_delayed_resonance(p, t_final, spec.delay, spec.t_ramp, n_steps);
      case GuessKind::two_plateau:
        return guess_field_two_plateau(p, t_final, spec.t_ramp, spec.first_level, spec.switch_time,
                                       spec.off_time, n_steps);
      case GuessKind::zero: return ControlField::zeros(t_final, n_steps);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown guess kind");
}

OptimizationRun run_optimization(const ScenarioConfig& cfg) {
  cfg.validate();
  DensityMatrix rho0 = make_initial_state(cfg.initial, cfg.params);
  ControlField guess = make_guess(cfg.guess, cfg.params, cfg.t_final, cfg.n_steps);
  OptimizationResult result = optimize(rho0, guess, cfg.params, cfg.krotov);
  return {std::move(rho0), std::move(guess), std::move(result)};
}

std::uint64_t realization_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double RobustnessResult::standard_error() const {
  return errors.empty() ? 0.0 : std_error / std::sqrt(static_cast<double>(errors.size()));
}

RobustnessResult robustness_monte_carlo(const ControlField& field, const InitialStateSpec& init,
                                        const ModelParams& p, const NoiseSpec& noise, int threads) {
  if (noise.level < 0.0) throw std::invalid_argument("robustness_monte_carlo: level must be >= 0");
  if (noise.realizations < 1) throw std::invalid_argument("robustness_monte_carlo: need realizations >= 1");
  const Liouvillian lv(p);
  const Matrix4c rho_nominal = make_initial_state(init, p).as4();

  RobustnessResult out;
  out.noiseless_error = reset_error(propagate_final(rho_nominal, field, lv));
  out.errors.assign(static_cast<std::size_t>(noise.realizations), 0.0);

  parallel_for(noise.realizations, threads, [&](int i) {
    std::mt19937_64 rng(realization_seed(noise.seed, static_cast<std::uint64_t>(i)));
    std::normal_distribution<double> factor(1.0, noise.level);
    double error = 0.0;
    if (noise.kind == NoiseKind::amplitude) {
      ControlField noisy = field;
      if (noise.per_step) {
        for (int j = 0; j < noisy.n_steps(); ++j) noisy[j] *= factor(rng);
      } else {
        noisy = field.scaled(factor(rng));
      }
      error = reset_error(propagate_final(rho_nominal, noisy, lv));
    } else {
      ModelParams drawn = p;
      drawn.omega_q *= factor(rng);
      drawn.omega_tls *= factor(rng);
      drawn.beta *= factor(rng);
      InitialStateSpec spec = init;
      // Keep the drawn correlated state physical.
      if (spec.kind == InitialKind::correlated) spec.gamma = std::max(spec.gamma, -correlation_bound(drawn));
      error = reset_error(propagate_final(make_initial_state(spec, drawn).as4(), field, lv));
    }
    out.errors[static_cast<std::size_t>(i)] = error;
  });

  double sum = 0.0;
  for (double e : out.errors) sum += e;
  out.mean_error = sum / noise.realizations;
  double sq = 0.0;
  for (double e : out.errors) sq += (e - out.mean_error) * (e - out.mean_error);
  out.std_error = noise.realizations > 1 ? std::sqrt(sq / (noise.realizations - 1)) : 0.0;
  return out;
}

void write_histogram_csv(std::ostream& os, const std::vector<double>& values, int bins) {
  if (bins < 1) throw std::invalid_argument("write_histogram_csv: bins must be >= 1");
  os << "bin_lo,bin_hi,count\n";
  if (values.empty()) return;
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double width = (*hi_it > lo) ? (*hi_it - lo) / bins : 1.0;
  std::vector<long> counts(static_cast<std::size_t>(bins), 0);
  for (double v : values) {
    const int b = std::min(bins - 1, static_cast<int>((v - lo) / width));
    ++counts[static_cast<std::size_t>(b)];
  }
  char line[128];
  for (int b = 0; b < bins; ++b) {
    std::snprintf(line, sizeof line, "%.12g,%.12g,%ld\n", lo + b * width, lo + (b + 1) * width,
                  counts[static_cast<std::size_t>(b)]);
    os << line;
  }
}

SweepResult correlation_sweep(const ScenarioConfig& cfg) {
  cfg.validate();
  const SweepSpec& s = cfg.sweep;
  const std::size_t n = s.gammas.size();
  SweepResult out;
  out.gammas = s.gammas;
  out.mutual_information.assign(n, 0.0);
  out.min_time.assign(n, std::numeric_limits<double>::quiet_NaN());
  out.min_error.assign(n, 0.0);

  parallel_for(static_cast<int>(n), cfg.threads, [&](int i) {
    const auto k = static_cast<std::size_t>(i);
    const double gamma = s.gammas[k];
    out.mutual_information[k] = mutual_information(correlated_initial_state(cfg.params, gamma));

    double best = optimized_error(cfg, gamma, s.t_max);
    auto probe = [&](double t) {
      const double e = optimized_error(cfg, gamma, t);
      best = std::min(best, e);
      return e < s.threshold;
    };
    if (best < s.threshold) {
      double lo = s.t_min;
      double hi = s.t_max;
      if (probe(lo)) {
        hi = lo;
      } else {
        while (hi - lo > s.resolution) {
          const double mid = 0.5 * (lo + hi);
          (probe(mid) ? hi : lo) = mid;
        }
      }
      out.min_time[k] = hi;
    }
    out.min_error[k] = best;
  });
  return out;
}

void write_sweep_csv(std::ostream& os, const SweepResult& sweep) {
  os << "gamma,MI,min_time,min_error\n";
  char line[160];
  for (std::size_t i = 0; i < sweep.gammas.size(); ++i) {
    std::snprintf(line, sizeof line, "%.12g,%.12g,%.12g,%.12g\n", sweep.gammas[i], sweep.mutual_information[i],
                  sweep.min_time[i], sweep.min_error[i]);
    os << line;
  }
}

void write_field_csv(std::ostream& os, const ControlField& guess, const ControlField& field) {
  if (guess.n_steps() != field.n_steps()) throw std::invalid_argument("write_field_csv: grids differ");
  os << "t,epsilon_guess,epsilon\n";
  char line[128];
  for (int j = 0; j < field.n_steps(); ++j) {
    std::snprintf(line, sizeof line, "%.12g,%.12g,%.12g\n", field.midpoint(j), guess[j], field[j]);
    os << line;
  }
}

ControlField read_field_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open field file " + file.string());
  std::string header;
  std::getline(in, header);
  if (header != "t,epsilon_guess,epsilon") throw ConfigError(file.string() + ": unexpected field CSV header");
  std::vector<double> values;
  double last_t = 0.0;
  std::string row;
  while (std::getline(in, row)) {
    if (row.empty()) continue;
    double t = 0.0;
    double g = 0.0;
    double e = 0.0;
    if (std::sscanf(row.c_str(), "%lf,%lf,%lf", &t, &g, &e) != 3) {
      throw ConfigError(file.string() + ": malformed row '" + row + "'");
    }
    values.push_back(e);
    last_t = t;
  }
  if (values.empty()) throw ConfigError(file.string() + ": no field samples");
  // Midpoints sit at (j + 1/2) dt, so the last one is T - dt/2.
  const double t_final = last_t * values.size() / (values.size() - 0.5);
  return ControlField(t_final, std::move(values));
}

json run_scenario(const ScenarioConfig& cfg, const ControlField* field) {
  cfg.validate();
  std::filesystem::create_directories(cfg.output_dir);

  json j;
  j["scenario"] = cfg.scenario;
  j["params"] = params_json(cfg.params);
  j["T"] = cfg.t_final;
  j["n_steps"] = cfg.n_steps;
  j["initial"] = {{"kind", initial_name(cfg.initial.kind)}, {"gamma", cfg.initial.gamma}};
  j["krotov"] = {{"lambda", cfg.krotov.lambda},
                 {"t_ramp", cfg.krotov.t_ramp},
                 {"max_iterations", cfg.krotov.max_iterations},
                 {"stop_delta", cfg.krotov.stop_delta}};

  const std::string& id = cfg.scenario;
  if (id == "fig4-sweep") {
    const SweepResult s = correlation_sweep(cfg);
    auto out = open_output(cfg.output_dir, "sweep.csv");
    write_sweep_csv(out, s);
    json times = json::array();
    for (double t : s.min_time) times.push_back(number_or_null(t));
    j["sweep"] = {{"gammas", s.gammas},
                  {"mutual_information", s.mutual_information},
                  {"min_time", times},
                  {"min_error", s.min_error},
                  {"threshold", cfg.sweep.threshold},
                  {"resolution", cfg.sweep.resolution}};
  } else if (id == "robustness") {
    OptimizationRun run = field ? OptimizationRun{make_initial_state(cfg.initial, cfg.params), *field,
                                                  OptimizationResult{*field, {}, {}, false}}
                                : run_optimization(cfg);
    if (field) {
      run.result.error_history.push_back(
          reset_error(propagate_final(run.rho0.as4(), *field, Liouvillian(cfg.params))));
    }
    j.update(optimization_summary(cfg, run, cfg.params, run.rho0));
    const RobustnessResult r =
        robustness_monte_carlo(run.result.final_field, cfg.initial, cfg.params, cfg.noise, cfg.threads);
    auto out = open_output(cfg.output_dir, "histogram.csv");
    write_histogram_csv(out, r.errors, cfg.noise.histogram_bins);
    j["robustness"] = robustness_json(cfg.noise, r);
  } else if (id == "rwa-compare") {
    ScenarioConfig rwa = cfg;
    rwa.params.rwa = true;
    ModelParams full = cfg.params;
    full.rwa = false;
    const OptimizationRun run = run_optimization(rwa);
    const DensityMatrix rho_full = make_initial_state(cfg.initial, full);
    j.update(optimization_summary(cfg, run, full, rho_full));
    const double full_error = reset_error(propagate_final(rho_full.as4(), run.result.final_field, Liouvillian(full)));
    j["rwa"] = {{"rwa_error", run.result.final_error()},
                {"full_error", full_error},
                {"degradation", full_error - run.result.final_error()}};
  } else {
    const OptimizationRun run = run_optimization(cfg);
    j.update(optimization_summary(cfg, run, cfg.params, run.rho0));
    if (id == "fig7-geometric") {
      const ZState z0 = lab_to_z(run.rho0, cfg.params, 0.0, 0.0);
      const SphereGeometry g = sphere_geometry(z0);
      const ProtocolSchedule schedule = correlated_protocol(z0, cfg.params.coupling, kProtocolTau);
      const ZTrajectory zt = propagate_z(z0, schedule, kProtocolDt);
      auto out = open_output(cfg.output_dir, "zspace.csv");
      write_z_csv(out, zt);
      const double target = g.z1c + g.r1;
      j["protocol"] = {{"tau", kProtocolTau},
                       {"total_time", schedule.total_time()},
                       {"swap_time_min", swap_time_min(cfg.params.coupling)},
                       {"final_z1", zt.states.back()(1)},
                       {"target_z1", target},
                       {"max_purity", g.r2 <= 1e-9 ? json(max_purity(g)) : json(nullptr)}};
    }
  }

  auto out = open_output(cfg.output_dir, "result.json");
  out << j.dump(2) << "\n";
  return j;
}

}  // namespace qreset
