#include "qreset/geometric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace qreset {

namespace {

using ZVec = std::array<double, 8>;

// Diagonal of the RWA H0 in basis |00>, |01>, |10>, |11>.
std::array<double, 4> bare_energies(const ModelParams& p, double field) {
  const double q = 0.5 * (p.omega_q + field);
  const double t = 0.5 * p.omega_tls;
  return {-q - t, -q + t, q - t, q + t};
}

struct Drive {
  double j1;
  double j2;
  double alpha;
};

Drive drive_at(double t, double delta, double delta_rate, double coupling) {
  return {coupling * std::cos(delta * t), coupling * std::sin(delta * t), 0.5 * delta_rate * t};
}

using Generator = Eigen::Matrix<double, 7, 7>;

// Generator of the motion of (z1 - z1c, z2, z3, z5, z6, z7, z8). Both blocks
// are antisymmetric, which is what keeps R1 and R2 fixed.
Generator generator(const Drive& d) {
  Generator a = Generator::Zero();
  a(0, 1) = -2.0 * d.j1;
  a(0, 2) = -2.0 * d.j2;
  a(1, 2) = -2.0 * d.alpha;
  a(3, 4) = -d.j1;
  a(3, 5) = 2.0 * d.alpha;
  a(3, 6) = d.j2;
  a(4, 5) = -d.j2;
  a(5, 6) = d.j1;
  return a - a.transpose();
}

// Fourth-order Magnus step with two Gauss points. The exponential of an
// antisymmetric matrix is orthogonal, so the invariants survive to round-off.
template <class DriveFn>
ZVec magnus_step(const ZVec& z, double t, double h, double z1c, DriveFn&& drive) {
  const double offset = std::sqrt(3.0) / 6.0;
  const Generator a1 = generator(drive(t + (0.5 - offset) * h));
  const Generator a2 = generator(drive(t + (0.5 + offset) * h));
  const Generator omega = 0.5 * h * (a1 + a2) + (std::sqrt(3.0) / 12.0) * h * h * (a2 * a1 - a1 * a2);
  const Generator u = omega.exp();
  Eigen::Matrix<double, 7, 1> v;
  v << z[0] - z1c, z[1], z[2], z[4], z[5], z[6], z[7];
  v = u * v;
  return {v(0) + z1c, v(1), v(2), z[3], v(3), v(4), v(5), v(6)};
}

// Rotates (z3 + i z2) and (z5 + i z7) by `angle`.
void rotate_phase(ZVec& z, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const double z3 = c * z[2] - s * z[1];
  const double z2 = s * z[2] + c * z[1];
  z[2] = z3;
  z[1] = z2;
  const double z5 = c * z[4] - s * z[6];
  const double z7 = s * z[4] + c * z[6];
  z[4] = z5;
  z[6] = z7;
}

ZState wrap(const ZVec& z) {
  ZState s;
  s.z = z;
  return s;
}

}  // namespace

ComplexMatrix to_rotating_frame(const ComplexMatrix& rho, const ModelParams& p, double field,
                                double t) {
  if (rho.rows() != 4 || rho.cols() != 4) throw std::invalid_argument("to_rotating_frame: need 4x4");
  const auto e = bare_energies(p, field);
  ComplexMatrix out(4, 4);
  for (int j = 0; j < 4; ++j) {
    for (int k = 0; k < 4; ++k) {
      out(j, k) = rho(j, k) * std::polar(1.0, (e[static_cast<std::size_t>(j)] - e[static_cast<std::size_t>(k)]) * t);
    }
  }
  return out;
}

XState x_representation(const DensityMatrix& rho_rot) {
  if (rho_rot.dim() != 4) throw std::invalid_argument("x_representation: need a 4x4 state");
  XState x;
  for (int i = 0; i < 4; ++i) x(i + 1) = rho_rot(i, i).real();
  int next = 5;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      x(next) = rho_rot(i, j).real();
      x(next + 1) = rho_rot(i, j).imag();
      next += 2;
    }
  }
  return x;
}

ComplexMatrix from_x_representation(const XState& x) {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  for (int i = 0; i < 4; ++i) m(i, i) = x(i + 1);
  int next = 5;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      m(i, j) = Complex(x(next), x(next + 1));
      m(j, i) = std::conj(m(i, j));
      next += 2;
    }
  }
  return m;
}

ZState z_transform(const XState& x) {
  ZState z;
  z(1) = x(1) + x(2) - 0.5;
  z(2) = x(12);
  z(3) = x(11);
  z(4) = -2.0 * x(1) - x(2) - x(3);
  z(5) = x(7) + x(13);
  z(6) = x(6) - x(16);
  z(7) = x(8) + x(14);
  z(8) = x(5) - x(15);
  return z;
}

ZState lab_to_z(const DensityMatrix& rho, const ModelParams& p, double field, double t) {
  return z_transform(x_representation(
      DensityMatrix(to_rotating_frame(rho.matrix(), p, field, t), kIntegratedStateTolerance)));
}

double purity_z(const ZState& z) {
  return 0.5 + 2.0 * (z(1) * z(1) + z(5) * z(5) + z(7) * z(7));
}

SphereGeometry sphere_geometry(const ZState& z) {
  const double c = z.z1c();
  return {std::hypot(z(1) - c, z(2), z(3)),
          std::sqrt(z(5) * z(5) + z(6) * z(6) + z(7) * z(7) + z(8) * z(8)), c};
}

double max_purity(const SphereGeometry& g) {
  if (g.r2 > 1e-9) throw std::invalid_argument("max_purity: only defined for R2 = 0");
  const double edge = g.z1c >= 0.0 ? g.z1c + g.r1 : g.z1c - g.r1;
  return 0.5 + 2.0 * edge * edge;
}

double min_error_bound(const ModelParams& p) {
  const double p_q = thermal_two_level(p.omega_q, p.beta)(0, 0).real();
  const double p_tls = thermal_two_level(p.omega_tls, p.beta)(0, 0).real();
  return p_tls > p_q ? 1.0 - p_tls : 1.0 - p_q;
}

double swap_time_min(double coupling) {
  if (!(coupling > 0.0)) throw std::invalid_argument("swap_time_min: coupling must be positive");
  return 0.5 * std::numbers::pi / coupling;
}

double swap_time_min(const std::function<double(double)>& coupling, double t_max, double dt) {
  const double target = 0.5 * std::numbers::pi;
  double area = 0.0;
  for (double t = 0.0; t < t_max; t += dt) {
    const double h = std::min(dt, t_max - t);
    // Simpson on [t, t + h]
    const double inc = h / 6.0 * (coupling(t) + 4.0 * coupling(t + 0.5 * h) + coupling(t + h));
    if (inc < 0.0) throw std::invalid_argument("swap_time_min: coupling must be non-negative");
    if (area + inc >= target) {
      // Linear interpolation inside the final step.
      return t + h * (target - area) / inc;
    }
    area += inc;
  }
  throw std::invalid_argument("swap_time_min: pulse area pi/2 not reached before t_max");
}

double ProtocolSchedule::total_time() const {
  double t = 0.0;
  for (const auto& ph : phases) t += ph.duration;
  return t;
}

ProtocolSchedule schedule_from_field(const ControlField& field, const ModelParams& p) {
  ProtocolSchedule s;
  s.phases.reserve(static_cast<std::size_t>(field.n_steps()));
  for (int j = 0; j < field.n_steps(); ++j) {
    s.phases.push_back({field.dt(), p.omega_q + field[j] - p.omega_tls, 0.0, p.coupling});
  }
  return s;
}

ZTrajectory propagate_z(const ZState& z0, const ProtocolSchedule& schedule, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("propagate_z: dt must be positive");
  ZTrajectory out;
  ZVec z = z0.z;
  const double z1c = z0.z1c();
  double t = 0.0;
  double previous_detuning = schedule.phases.empty() ? 0.0 : schedule.phases.front().detuning;
  out.times.push_back(t);
  out.states.push_back(wrap(z));
  for (const auto& ph : schedule.phases) {
    if (ph.duration <= 0.0) throw std::invalid_argument("propagate_z: phase durations must be > 0");
    rotate_phase(z, -(ph.detuning - previous_detuning) * t);
    const double t_start = t;
    auto drive = [&](double tau) {
      return drive_at(tau, ph.detuning + ph.detuning_rate * (tau - t_start), ph.detuning_rate,
                      ph.coupling);
    };
    const int steps = std::max(1, static_cast<int>(std::ceil(ph.duration / dt - 1e-9)));
    const double h = ph.duration / steps;
    for (int k = 0; k < steps; ++k) {
      z = magnus_step(z, t, h, z1c, drive);
      t = t_start + (k + 1) * h;
      out.times.push_back(t);
      out.states.push_back(wrap(z));
    }
    previous_detuning = ph.detuning + ph.detuning_rate * ph.duration;
  }
  return out;
}

ZTrajectory propagate_z(const ZState& z0, const std::function<double(double)>& detuning,
                        const std::function<double(double)>& detuning_rate,
                        const std::function<double(double)>& coupling, double t_final, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("propagate_z: dt must be positive");
  ZTrajectory out;
  ZVec z = z0.z;
  const double z1c = z0.z1c();
  auto drive = [&](double t) { return drive_at(t, detuning(t), detuning_rate(t), coupling(t)); };
  const int steps = std::max(1, static_cast<int>(std::ceil(t_final / dt - 1e-9)));
  const double h = t_final / steps;
  out.times.push_back(0.0);
  out.states.push_back(wrap(z));
  for (int k = 0; k < steps; ++k) {
    z = magnus_step(z, k * h, h, z1c, drive);
    out.times.push_back((k + 1) * h);
    out.states.push_back(wrap(z));
  }
  return out;
}

ProtocolSchedule correlated_protocol(const ZState& z0, double coupling, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("correlated_protocol: tau must be positive");
  if (!(coupling > 0.0)) throw std::invalid_argument("correlated_protocol: coupling must be positive");
  const double pi = std::numbers::pi;
  const double w_abs = std::hypot(z0(2), z0(3));
  ProtocolSchedule schedule;
  ZState start = z0;

  // Rotation of (z3 + i z2) that brings the correlation vector to z2 = -|w|.
  double angle = -0.5 * pi - std::atan2(z0(2), z0(3));
  angle = std::remainder(angle, 2.0 * pi);
  if (w_abs > 1e-12 && std::abs(angle) > 1e-12) {
    // delta(t) = rate t on [0, tau], then delta = 0: the alpha term and the
    // jump back to resonance rotate by rate tau^2 / 2 in total.
    const double rate = 2.0 * angle / (tau * tau);
    schedule.phases.push_back({tau, 0.0, rate, coupling});
    const ZTrajectory sweep = propagate_z(z0, schedule, tau / 400.0);
    start = sweep.states.back();
    // Jump back to zero detuning at t = tau.
    ZVec z = start.z;
    rotate_phase(z, rate * tau * tau);
    start.z = z;
  }

  const SphereGeometry g = sphere_geometry(start);
  const double c = std::clamp((start(1) - g.z1c) / g.r1, -1.0, 1.0);
  double theta = std::acos(c);
  if (start(2) > 0.0) theta = 2.0 * pi - theta;
  if (theta > 0.0) schedule.phases.push_back({theta / (2.0 * coupling), 0.0, 0.0, coupling});
  return schedule;
}

void write_z_csv(std::ostream& os, const ZTrajectory& traj) {
  os << "t,z1,z2,z3,z5,z6,z7,z8,R1,R2\n";
  char line[512];
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const ZState& z = traj.states[i];
    const SphereGeometry g = sphere_geometry(z);
    std::snprintf(line, sizeof line, "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                  traj.times[i], z(1), z(2), z(3), z(5), z(6), z(7), z(8), g.r1, g.r2);
    os << line;
  }
}

}  // namespace qreset
