#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <vector>

#include "qreset/linalg.hpp"
#include "qreset/model.hpp"

namespace qreset {

/// Real parametrization of a 4x4 density matrix (in the rotating frame):
/// x1..x4 are the populations; (x5,x6), (x7,x8), (x9,x10), (x11,x12),
/// (x13,x14), (x15,x16) are real and imaginary parts of the upper-triangle
/// coherences rho_12, rho_13, rho_14, rho_23, rho_24, rho_34.
struct XState {
  std::array<double, 16> x{};
  /// 1-based access matching the variable names x1..x16.
  double operator()(int i) const { return x[static_cast<std::size_t>(i - 1)]; }
  double& operator()(int i) { return x[static_cast<std::size_t>(i - 1)]; }
};

/// Reduced coordinates z1..z8 and the sphere centre z1c = -(z4 + 1) / 2.
struct ZState {
  std::array<double, 8> z{};
  double operator()(int i) const { return z[static_cast<std::size_t>(i - 1)]; }
  double& operator()(int i) { return z[static_cast<std::size_t>(i - 1)]; }
  double z1c() const { return -0.5 * (z[3] + 1.0); }
};

struct SphereGeometry {
  double r1 = 0.0;
  double r2 = 0.0;
  double z1c = 0.0;
};

/// rho' = O^+ rho O with O = exp(-i H0 t), H0 the diagonal part of the RWA
/// Hamiltonian at field value `field`.
ComplexMatrix to_rotating_frame(const ComplexMatrix& rho, const ModelParams& p, double field,
                                double t);

XState x_representation(const DensityMatrix& rho_rot);
/// Inverse of x_representation.
ComplexMatrix from_x_representation(const XState& x);

ZState z_transform(const XState& x);

/// Lab-frame state at time t (field value in effect just before t) to z.
ZState lab_to_z(const DensityMatrix& rho, const ModelParams& p, double field, double t);

/// Qubit purity 1/2 + 2 (z1^2 + z5^2 + z7^2).
double purity_z(const ZState& z);

SphereGeometry sphere_geometry(const ZState& z);

/// Largest qubit purity on the S1 sphere. Requires R2 = 0.
double max_purity(const SphereGeometry& g);

/// Lowest reset error reachable from the factorizing thermal state:
/// 1 - p_TLS when the TLS is purer than the qubit, else the qubit's own error.
double min_error_bound(const ModelParams& p);

/// pi / (2 J).
double swap_time_min(double coupling);
/// Smallest T with integral_0^T J(t) dt = pi/2 (J(t) >= 0), searched up to t_max.
double swap_time_min(const std::function<double(double)>& coupling, double t_max,
                     double dt = 1e-4);

/// Piece of a protocol: detuning delta(t) = detuning + detuning_rate (t - t_start)
/// and constant coupling J over `duration`.
struct ProtocolPhase {
  double duration = 0.0;
  double detuning = 0.0;
  double detuning_rate = 0.0;
  double coupling = 0.0;
};

struct ProtocolSchedule {
  std::vector<ProtocolPhase> phases;
  double total_time() const;
};

/// One constant-detuning phase per field interval, delta = omega_Q + eps - omega_TLS.
ProtocolSchedule schedule_from_field(const ControlField& field, const ModelParams& p);

struct ZTrajectory {
  std::vector<double> times;
  std::vector<ZState> states;
};

/// Integrates the S1/S2 equations of motion with a fixed-step fourth-order
/// Magnus scheme, which preserves both sphere radii exactly.
///
/// Inside a phase the alpha term uses the analytic d(delta)/dt; a detuning
/// jump between phases at time t rotates (z3 + i z2) and (z5 + i z7) by
/// -(jump) t, the integral of alpha across the step. States are recorded at
/// every integration step, before any jump at that time.
ZTrajectory propagate_z(const ZState& z0, const ProtocolSchedule& schedule, double dt);

/// Smooth detuning and coupling given as functions of time.
ZTrajectory propagate_z(const ZState& z0, const std::function<double(double)>& detuning,
                        const std::function<double(double)>& detuning_rate,
                        const std::function<double(double)>& coupling, double t_final, double dt);

/// Two-stage time-optimal protocol for correlated states: a linear detuning
/// sweep of length tau rotating (z2, z3) into z3 = 0, z2 <= 0, then the
/// resonant meridian of duration theta / (2 J), cos theta = (z1(tau) - z1c) / R1.
ProtocolSchedule correlated_protocol(const ZState& z0, double coupling, double tau);

/// CSV with columns t, z1, z2, z3, z5, z6, z7, z8, R1, R2.
void write_z_csv(std::ostream& os, const ZTrajectory& traj);

}  // namespace qreset
