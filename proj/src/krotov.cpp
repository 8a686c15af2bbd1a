#include "qreset/krotov.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qreset/errors.hpp"

namespace qreset {

namespace {

constexpr double kMonotonicitySlack = 1e-9;

double sin2_ramp(double s) {
  const double v = std::sin(0.5 * std::numbers::pi * std::clamp(s, 0.0, 1.0));
  return v * v;
}

}  // namespace

ShapeFunction::ShapeFunction(double t_final, double t_ramp) : t_final_(t_final), t_ramp_(t_ramp) {
  if (t_ramp < 0.0 || 2.0 * t_ramp > t_final) {
    throw std::invalid_argument("ShapeFunction: need 0 <= t_ramp <= T/2");
  }
}

double ShapeFunction::operator()(double t) const {
  if (t_ramp_ == 0.0) return (t < 0.0 || t > t_final_) ? 0.0 : 1.0;
  if (t <= 0.0 || t >= t_final_) return 0.0;
  if (t < t_ramp_) return sin2_ramp(t / t_ramp_);
  if (t > t_final_ - t_ramp_) return sin2_ramp((t_final_ - t) / t_ramp_);
  return 1.0;
}

double ShapeFunction::interval_weight(double t0, double t1) const {
  if (t_ramp_ == 0.0) return 1.0;
  // The shape rises then falls, so its minimum sits at an interval end.
  return std::min((*this)(t0), (*this)(t1));
}

ControlField guess_field_resonant_ramp(const ModelParams& p, double t_final, double t_ramp,
                                       double hold, int n_steps) {
  if (t_ramp < 0.0 || hold < 0.0 || 2.0 * t_ramp + hold > t_final + 1e-12) {
    throw std::invalid_argument("guess_field_resonant_ramp: need 2 t_ramp + hold <= T");
  }
  const double plateau = p.omega_tls - p.omega_q;
  const double off = 2.0 * t_ramp + hold;
  auto f = [&](double t) {
    if (t_ramp > 0.0 && t < t_ramp) return plateau * sin2_ramp(t / t_ramp);
    if (t <= t_ramp + hold) return plateau;
    if (t < off) return plateau * sin2_ramp((off - t) / t_ramp);
    return 0.0;
  };
  ControlField field = ControlField::sample(t_final, n_steps, f);
  field.t_ramp = t_ramp;
  return field;
}

ControlField guess_field_delayed_resonance(const ModelParams& p, double t_final, double delay,
                                           double t_ramp, int n_steps) {
  if (delay < 0.0 || t_ramp <= 0.0 || delay + 2.0 * t_ramp > t_final) {
    throw std::invalid_argument("guess_field_delayed_resonance: need delay + 2 t_ramp <= T");
  }
  const double plateau = p.omega_tls - p.omega_q;
  ControlField field = ControlField::sample(t_final, n_steps, [&](double t) {
    return plateau * std::min(sin2_ramp((t - delay) / t_ramp), sin2_ramp((t_final - t) / t_ramp));
  });
  field.t_ramp = t_ramp;
  return field;
}

ControlField guess_field_two_plateau(const ModelParams& p, double t_final, double t_ramp,
                                     double first_level, double switch_time, double off_time,
                                     int n_steps) {
  if (t_ramp <= 0.0 || switch_time < t_ramp || off_time < switch_time + t_ramp ||
      off_time + t_ramp > t_final) {
    throw std::invalid_argument(
        "guess_field_two_plateau: need t_ramp <= switch_time, switch_time + t_ramp <= off_time, "
        "off_time + t_ramp <= T");
  }
  const double plateau = p.omega_tls - p.omega_q;
  ControlField field = ControlField::sample(t_final, n_steps, [&](double t) {
    double v = first_level * sin2_ramp(t / t_ramp);
    if (t > switch_time) v += (plateau - first_level) * sin2_ramp((t - switch_time) / t_ramp);
    if (t > off_time) v *= sin2_ramp((off_time + t_ramp - t) / t_ramp);
    return v;
  });
  field.t_ramp = t_ramp;
  return field;
}

Matrix4c costate_boundary(const DensityMatrix& /*rho_final*/) {
  Matrix4c chi = Matrix4c::Zero();
  chi(0, 0) = 1.0;
  chi(1, 1) = 1.0;
  return chi;
}

CostateTrajectory backward_propagate(const Matrix4c& chi_final, const ControlField& field,
                                     const ModelParams& p) {
  const Liouvillian lv(p);
  const int n = field.n_steps();
  const double dt = field.dt();
  CostateTrajectory out;
  out.times.resize(static_cast<std::size_t>(n + 1));
  out.states.resize(static_cast<std::size_t>(n + 1));
  Matrix4c chi = chi_final;
  out.states[static_cast<std::size_t>(n)] = chi;
  out.times[static_cast<std::size_t>(n)] = field.t_final();
  for (int j = n - 1; j >= 0; --j) {
    chi = lv.step_adjoint(chi, field[j], dt);
    chi = 0.5 * (chi + chi.adjoint()).eval();
    out.states[static_cast<std::size_t>(j)] = chi;
    out.times[static_cast<std::size_t>(j)] = j * dt;
  }
  return out;
}

double krotov_update(const Matrix4c& chi, const Matrix4c& rho, const Matrix4c& control_op,
                     double shape, double lambda) {
  if (shape == 0.0) return 0.0;
  const Matrix4c comm = control_op * rho - rho * control_op;
  // tr(chi^+ (-i) comm) is real for Hermitian chi, rho, control_op.
  const Complex overlap = Complex(0.0, -1.0) * (chi.adjoint() * comm).trace();
  return shape / lambda * overlap.real();
}

OptimizationResult optimize(const DensityMatrix& rho0, const ControlField& guess,
                            const ModelParams& p, const KrotovConfig& cfg,
                            const IterationObserver& observer) {
  if (!(cfg.lambda > 0.0)) throw std::invalid_argument("optimize: lambda must be positive");
  if (cfg.max_iterations < 0) throw std::invalid_argument("optimize: max_iterations < 0");
  p.validate();

  const Liouvillian lv(p);
  const ShapeFunction shape(guess.t_final(), cfg.t_ramp);
  const int n = guess.n_steps();
  const double dt = guess.dt();
  const Matrix4c rho_init = rho0.as4();

  std::vector<double> weights(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) weights[static_cast<std::size_t>(j)] = shape.interval_weight(j * dt, (j + 1) * dt);

  OptimizationResult result{guess, {}, {}, false};
  Matrix4c rho_final = propagate_final(rho_init, guess, lv);
  result.error_history.push_back(reset_error(rho_final));
  if (cfg.store_field_history) result.field_history.push_back(guess);

  ControlField field = guess;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    const CostateTrajectory chi = backward_propagate(
        costate_boundary(DensityMatrix(ComplexMatrix(rho_final), kIntegratedStateTolerance)), field, p);

    Matrix4c rho = rho_init;
    for (int j = 0; j < n; ++j) {
      const double w = weights[static_cast<std::size_t>(j)];
      field[j] += krotov_update(chi.states[static_cast<std::size_t>(j)], rho, lv.control_operator(), w, cfg.lambda);
      rho = lv.step(rho, field[j], dt);
      rho = 0.5 * (rho + rho.adjoint()).eval();
    }
    rho_final = rho;
    const double error = reset_error(rho_final);
    const double previous = result.error_history.back();
    result.error_history.push_back(error);
    if (cfg.store_field_history) result.field_history.push_back(field);
    if (observer) observer(it, error);

    if (error > previous + kMonotonicitySlack) {
      std::ostringstream os;
      os << "optimize: error rose from " << previous << " to " << error << " at iteration " << it
         << " (lambda too small?)";
      throw NumericalError(os.str());
    }
    if (previous - error < cfg.stop_delta) {
      result.converged = true;
      break;
    }
  }
  result.final_field = field;
  return result;
}

}  // namespace qreset
