#pragma once

#include <functional>
#include <vector>

#include "qreset/dynamics.hpp"
#include "qreset/model.hpp"

namespace qreset {

/// Update envelope: 1 in the bulk with sin^2 switch-on/off ramps of length
/// t_ramp, zero at t = 0 and t = T.
class ShapeFunction {
 public:
  ShapeFunction(double t_final, double t_ramp);
  double operator()(double t) const;
  /// Minimum of the shape over [t0, t1]; used as the per-interval weight so
  /// that the first and last intervals are pinned exactly.
  double interval_weight(double t0, double t1) const;

 private:
  double t_final_;
  double t_ramp_;
};

struct KrotovConfig {
  double lambda = 100.0;
  double t_ramp = 2.0;
  int max_iterations = 5000;
  double stop_delta = 1e-8;
  bool store_field_history = false;
};

struct OptimizationResult {
  ControlField final_field;
  /// error_history[0] is the guess field's error; one entry per iteration after.
  std::vector<double> error_history;
  std::vector<ControlField> field_history;
  bool converged = false;

  int iterations() const { return static_cast<int>(error_history.size()) - 1; }
  double final_error() const { return error_history.back(); }
};

/// Guess field: sin^2 ramp from 0 to the resonant value omega_TLS - omega_Q,
/// a plateau of length `hold`, a sin^2 ramp back to 0, then 0 until T.
ControlField guess_field_resonant_ramp(const ModelParams& p, double t_final, double t_ramp,
                                       double hold, int n_steps);

/// Zero for `delay`, then a sin^2 ramp up to resonance, held until the
/// closing ramp brings the field back to 0 exactly at T.
ControlField guess_field_delayed_resonance(const ModelParams& p, double t_final, double delay,
                                           double t_ramp, int n_steps);

/// Detuned start: ramp to `first_level`, step up to resonance at
/// `switch_time`, then ramp down to 0 starting at `off_time`.
ControlField guess_field_two_plateau(const ModelParams& p, double t_final, double t_ramp,
                                     double first_level, double switch_time, double off_time,
                                     int n_steps);

/// chi(T) = -d(error)/d rho(T) = |0><0|_Q (x) 1_TLS.
Matrix4c costate_boundary(const DensityMatrix& rho_final);

struct CostateTrajectory {
  std::vector<double> times;
  std::vector<Matrix4c> states;  // chi(t_k), k = 0..n
};

/// Adjoint master equation integrated from T back to 0 on the field's grid.
CostateTrajectory backward_propagate(const Matrix4c& chi_final, const ControlField& field,
                                     const ModelParams& p);

/// First-order Krotov increment
///   (shape / lambda) * tr(chi (-i)[dH/d field, rho]),
/// which is real for Hermitian chi and rho and points downhill in the error.
double krotov_update(const Matrix4c& chi, const Matrix4c& rho, const Matrix4c& control_op,
                     double shape, double lambda);

/// Called after every iteration with (iteration, error).
using IterationObserver = std::function<void(int, double)>;

/// Sequential Krotov optimization of the reset error.
///
/// Throws NumericalError if an iteration raises the error by more than 1e-9.
OptimizationResult optimize(const DensityMatrix& rho0, const ControlField& guess,
                            const ModelParams& p, const KrotovConfig& cfg,
                            const IterationObserver& observer = {});

}  // namespace qreset
