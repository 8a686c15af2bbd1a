// End-to-end acceptance run: one PASS/FAIL line per criterion, exit status 1
// if any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include <unsupported/Eigen/MatrixFunctions>

#include "qreset/correlations.hpp"
#include "qreset/dynamics.hpp"
#include "qreset/experiments.hpp"
#include "qreset/geometric.hpp"
#include "qreset/krotov.hpp"
#include "test_util.hpp"

using namespace qreset;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < budget_s;
  const bool pass = out.pass && in_time;
  if (!pass) ++g_failures;
  std::printf("[%s] %2d %s: %s (%.3g s, budget %.3g s%s)\n", pass ? "PASS" : "FAIL", id, name, out.detail.c_str(),
              secs, budget_s, in_time ? "" : ", over budget");
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

bool monotone(const std::vector<double>& h) {
  for (std::size_t i = 1; i < h.size(); ++i) {
    if (h[i] > h[i - 1] + 1e-9) return false;
  }
  return true;
}

int worker_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

}  // namespace

int main() {
  const ModelParams bench = benchmark_params();
  const double pi = std::numbers::pi;

  criterion(1, "analytic bounds", 1e-3, [&] {
    const double eps = min_error_bound(bench);
    const double t_min = swap_time_min(bench.coupling);
    return Outcome{std::abs(eps - 0.04742) <= 1e-4 && std::abs(t_min - 15.708) <= 1e-3,
                   fmt("eps_min = %.6f, T_min = %.6f", eps, t_min)};
  });

  criterion(2, "thermal-state oracle", 1e-2, [&] {
    const Matrix4c e = (-bench.beta * static_hamiltonian(bench)).exp();
    const double diff = max_abs(joint_thermal_state(bench).matrix() - e / e.trace());
    return Outcome{diff <= 1e-10, fmt("max |rho - exp(-bH)/Z| = %.3g", diff)};
  });

  criterion(3, "swap propagation", 1.0, [&] {
    const double t = swap_time_min(bench.coupling);
    const ControlField swap = ControlField::sample(t, 3142, [&](double) { return bench.omega_tls - bench.omega_q; });
    const Trajectory traj = propagate(factorizing_initial_state(bench), swap, bench, 3142);
    const double pq = 1.0 - reset_error(traj.states.back());
    return Outcome{pq >= 0.948, fmt("p_Q(T) = %.6f", pq)};
  });

  std::optional<ControlField> fig2a_field;
  criterion(4, "Krotov reproduction (fig2a)", 300.0, [&] {
    const OptimizationRun run = run_optimization(default_config("fig2a"));
    fig2a_field = run.result.final_field;
    const double e = run.result.final_error();
    const bool mono = monotone(run.result.error_history);
    return Outcome{e >= 0.0474 && e <= 0.053 && mono,
                   fmt("error %.5f after %.0f iterations, monotone %.0f", e, run.result.iterations(), mono)};
  });

  criterion(5, "correlated thermal start (fig3a)", 300.0, [&] {
    const OptimizationRun run = run_optimization(default_config("fig3-thermal"));
    const double e = run.result.final_error();
    return Outcome{e <= 0.0480 && monotone(run.result.error_history), fmt("error %.5f", e)};
  });

  criterion(6, "resonant correlated start", 300.0, [&] {
    const ScenarioConfig cfg = default_config("fig3-resonant");
    const OptimizationRun run = run_optimization(cfg);
    const double e = run.result.final_error();
    const double bound = min_error_bound(cfg.params);
    const double mi_final = mutual_information(
        DensityMatrix(ComplexMatrix(propagate_final(run.rho0.as4(), run.result.final_field, Liouvillian(cfg.params))),
                      kIntegratedStateTolerance));
    return Outcome{e <= 0.115 && e < bound && monotone(run.result.error_history),
                   fmt("error %.5f vs factorizing bound %.4f, final MI %.2g", e, bound, mi_final)};
  });

  criterion(7, "correlation measures", 1e-2, [&] {
    ModelParams res = bench;
    res.omega_tls = 1.0;
    const DensityMatrix resonant = correlated_initial_state(res, -0.19);
    const double mi_thermal = mutual_information(joint_thermal_state(bench));
    const double mi_res = mutual_information(resonant);
    const double discord = quantum_discord_xstate(resonant);
    double conc = 0.0;
    for (const DensityMatrix& rho : {joint_thermal_state(bench), correlated_initial_state(bench, -0.09), resonant}) {
      conc = std::max(conc, concurrence(rho));
    }
    const bool ok = std::abs(mi_thermal - 4.0e-3) <= 0.2e-3 && std::abs(mi_res - 0.345) <= 0.002 &&
                    std::abs(discord - 0.228) <= 0.005 && conc <= 1e-12;
    std::ostringstream os;
    os << "MI thermal " << mi_thermal << ", MI resonant " << mi_res << ", discord " << discord
       << ", max concurrence " << conc;
    return Outcome{ok, os.str()};
  });

  criterion(8, "geometric oracle equivalence", 30.0, [&] {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> level(0.0, 4.0);
    ModelParams p = bench;
    p.kappa = 0.0;
    p.rwa = true;
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      std::vector<double> plateau(8);
      for (double& v : plateau) v = level(rng);
      const ControlField field = ControlField::sample(10.0, 2000, [&](double t) {
        return plateau[static_cast<std::size_t>(std::min(7, static_cast<int>(t / 10.0 * 8)))];
      });
      const DensityMatrix rho0 = correlated_initial_state(p, -0.05 * (k % 2));
      const Trajectory traj = propagate(rho0, field, p, 50);
      const ZTrajectory zt = propagate_z(lab_to_z(rho0, p, field[0], 0.0), schedule_from_field(field, p), field.dt());
      for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const int step = static_cast<int>(std::lround(traj.times[i] / field.dt()));
        const ZState lab = lab_to_z(traj.states[i], p, field[std::max(step - 1, 0)], traj.times[i]);
        for (int c = 1; c <= 8; ++c) {
          worst = std::max(worst, std::abs(lab(c) - zt.states[static_cast<std::size_t>(step)](c)));
        }
      }
    }
    return Outcome{worst <= 1e-7, fmt("max |z_lab - z_geo| = %.3g over 20 fields", worst)};
  });

  criterion(9, "sphere invariants", 30.0, [&] {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ModelParams p = bench;
    p.rwa = true;
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const ZState z0 = lab_to_z(qreset::testing::random_state(rng, 4), p, 0.0, 0.0);
      const SphereGeometry g0 = sphere_geometry(z0);
      const double a = 2.0 * u(rng);
      const double w = 0.5 + std::abs(u(rng));
      const ZTrajectory traj = propagate_z(
          z0, [=](double t) { return a * std::sin(w * t); }, [=](double t) { return a * w * std::cos(w * t); },
          [](double) { return 0.1; }, 25.0, 0.005);
      for (const auto& z : traj.states) {
        const SphereGeometry g = sphere_geometry(z);
        worst = std::max({worst, std::abs(g.r1 - g0.r1), std::abs(g.r2 - g0.r2), std::abs(z(4) - z0(4))});
      }
    }
    return Outcome{worst <= 1e-9, fmt("max drift of R1, R2, z4 = %.3g", worst)};
  });

  criterion(10, "speed-limit beating (fig7)", 300.0, [&] {
    const ScenarioConfig cfg = default_config("fig7-geometric");
    const OptimizationRun run = run_optimization(cfg);
    const double e = run.result.final_error();
    const ZState z0 = lab_to_z(run.rho0, cfg.params, 0.0, 0.0);
    const SphereGeometry g = sphere_geometry(z0);
    const ProtocolSchedule s = correlated_protocol(z0, cfg.params.coupling, 0.1);
    const double z1 = propagate_z(z0, s, 1e-3).states.back()(1);
    const double t_min = swap_time_min(cfg.params.coupling);
    const bool ok = e <= 0.025 && s.total_time() < t_min && std::abs(z1 - (g.z1c + g.r1)) <= 1e-3;
    std::ostringstream os;
    os << "error " << e << " at T = " << cfg.t_final << "; protocol time " << s.total_time() << " < " << t_min
       << ", |z1 - (z1c + R1)| = " << std::abs(z1 - (g.z1c + g.r1));
    return Outcome{ok, os.str()};
  });

  criterion(11, "robustness (fig2a field)", 600.0, [&] {
    if (!fig2a_field) return Outcome{false, "fig2a field unavailable"};
    NoiseSpec amp;
    amp.level = 0.01;
    amp.realizations = 1000;
    amp.seed = 1;
    const RobustnessResult a = robustness_monte_carlo(*fig2a_field, {}, bench, amp, worker_threads());
    NoiseSpec state = amp;
    state.kind = NoiseKind::state;
    state.level = 0.02;
    const RobustnessResult s = robustness_monte_carlo(*fig2a_field, {}, bench, state, worker_threads());
    const bool ok = a.mean_error >= 0.050 && a.mean_error <= 0.054 &&
                    std::abs(s.mean_error - s.noiseless_error) <= 5e-4;
    std::ostringstream os;
    os << "noiseless " << a.noiseless_error << ", amplitude 1% mean " << a.mean_error << ", state 2% mean "
       << s.mean_error;
    return Outcome{ok, os.str()};
  });

  criterion(12, "RWA cross-validation", 600.0, [&] {
    std::ostringstream os;
    bool ok = true;
    for (const char* start : {"factorizing", "thermal"}) {
      ScenarioConfig cfg = default_config("rwa-compare");
      if (std::string(start) == "thermal") cfg.initial.kind = InitialKind::thermal;
      ScenarioConfig rwa = cfg;
      rwa.params.rwa = true;
      const OptimizationRun run = run_optimization(rwa);
      const double full = reset_error(propagate_final(make_initial_state(cfg.initial, cfg.params).as4(),
                                                      run.result.final_field, Liouvillian(cfg.params)));
      const double degradation = full - run.result.final_error();
      ok = ok && degradation <= 0.003;
      os << start << ": " << run.result.final_error() << " -> " << full << "; ";
    }
    return Outcome{ok, os.str()};
  });

  criterion(13, "non-Markovianity diagnostic", 60.0, [&] {
    const DensityMatrix tls = thermal_two_level(bench.omega_tls, bench.beta);
    const ControlField swap = ControlField::sample(swap_time_min(bench.coupling), 3142,
                                                   [&](double) { return bench.omega_tls - bench.omega_q; });
    const VolumeSeries vs = dynamical_map_volume(swap, bench, tls);
    bool swap_monotone = true;
    for (std::size_t i = 1; i < vs.volume.size(); ++i) swap_monotone = swap_monotone && vs.volume[i] <= vs.volume[i - 1] + 1e-12;

    const ScenarioConfig c = default_config("fig2c");
    const VolumeSeries vd = dynamical_map_volume(make_guess(c.guess, c.params, c.t_final, c.n_steps), bench, tls);
    int increases = 0;
    for (std::size_t i = 1; i < vd.volume.size(); ++i) increases += vd.volume[i] > vd.volume[i - 1] + 1e-12;
    return Outcome{swap_monotone && increases > 0,
                   fmt("swap monotone %.0f, detuned field intervals of increase %.0f", swap_monotone, increases)};
  });

  criterion(14, "property suite", 120.0, [&] {
    std::mt19937_64 rng(99);
    std::ostringstream os;
    bool ok = true;

    // Krotov monotonicity on a short instance.
    KrotovConfig kc;
    kc.lambda = 0.2;
    kc.max_iterations = 30;
    const OptimizationResult r = optimize(factorizing_initial_state(bench),
                                          guess_field_resonant_ramp(bench, 20.0, 2.0, 13.0, 1000), bench, kc);
    ok = ok && monotone(r.error_history);
    os << "krotov monotone " << monotone(r.error_history);

    // Trace, Hermiticity and positivity along random-field trajectories.
    double worst_trace = 0.0;
    double worst_herm = 0.0;
    double worst_neg = 0.0;
    for (int k = 0; k < 5; ++k) {
      std::uniform_real_distribution<double> level(-1.0, 3.0);
      const double a = level(rng);
      const double b = level(rng);
      const ControlField f = ControlField::sample(10.0, 2000, [&](double t) { return t < 5.0 ? a : b; });
      for (const auto& rho : propagate(qreset::testing::random_state(rng, 4), f, bench, 10).states) {
        worst_trace = std::max(worst_trace, std::abs(rho.matrix().trace().real() - 1.0));
        worst_herm = std::max(worst_herm, max_abs(rho.matrix() - rho.matrix().adjoint()));
        worst_neg = std::max(worst_neg, -hermitian_eigensystem(rho.matrix()).values.minCoeff());
      }
    }
    ok = ok && worst_trace <= 1e-9 && worst_herm <= 1e-10 && worst_neg <= 1e-10;
    os << ", trace " << worst_trace << ", herm " << worst_herm << ", neg " << worst_neg;

    // Entropy and mutual-information invariances.
    double worst_inv = 0.0;
    for (int k = 0; k < 50; ++k) {
      const DensityMatrix qa = qreset::testing::random_state(rng, 2);
      const DensityMatrix qb = qreset::testing::random_state(rng, 2);
      const DensityMatrix prod(tensor_product(qa.matrix(), qb.matrix()));
      worst_inv = std::max(worst_inv, std::abs(von_neumann_entropy(prod) - von_neumann_entropy(qa) -
                                               von_neumann_entropy(qb)));
      const DensityMatrix rho = qreset::testing::random_state(rng, 4);
      const ComplexMatrix u = tensor_product(qreset::testing::random_unitary(rng, 2), qreset::testing::random_unitary(rng, 2));
      const ComplexMatrix rotated = u * rho.matrix() * u.adjoint();
      const DensityMatrix rho_u(ComplexMatrix(0.5 * (rotated + rotated.adjoint())));
      worst_inv = std::max({worst_inv, std::abs(mutual_information(rho_u) - mutual_information(rho)),
                            std::abs(von_neumann_entropy(rho_u) - von_neumann_entropy(rho))});
    }
    ok = ok && worst_inv <= 1e-9;
    os << ", invariance " << worst_inv;

    // Werner family closed form for the concurrence.
    double worst_werner = 0.0;
    for (int k = 0; k <= 20; ++k) {
      const double p = k / 20.0;
      worst_werner = std::max(worst_werner, std::abs(concurrence(qreset::testing::werner_state(p)) -
                                                     std::max(0.0, (3.0 * p - 1.0) / 2.0)));
    }
    ok = ok && worst_werner <= 1e-7;
    os << ", werner " << worst_werner;
    return Outcome{ok, os.str()};
  });

  std::printf("%s: %d of 14 criteria failed\n", g_failures == 0 ? "ACCEPTED" : "REJECTED", g_failures);
  return g_failures == 0 ? 0 : 1;
}
