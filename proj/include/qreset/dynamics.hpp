#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "qreset/linalg.hpp"
#include "qreset/model.hpp"

namespace qreset {

/// Generator of the Lindblad master equation
///   drho/dt = -i[H(field), rho] + sum_k kappa (L rho L^+ - 1/2 {L^+ L, rho})
/// with the field frozen over a time step.
class Liouvillian {
 public:
  explicit Liouvillian(const ModelParams& p);

  Matrix4c apply(const Matrix4c& rho, double field) const;
  /// Hilbert-Schmidt adjoint of apply().
  Matrix4c apply_adjoint(const Matrix4c& chi, double field) const;

  /// exp(G dt) rho, summed as a Taylor series to machine precision.
  Matrix4c step(const Matrix4c& rho, double field, double dt) const;
  /// exp(G^+ dt) chi; one step of backward costate propagation.
  Matrix4c step_adjoint(const Matrix4c& chi, double field, double dt) const;

  const ModelParams& params() const { return params_; }
  const Matrix4c& control_operator() const { return control_; }

 private:
  Matrix4c effective(double field) const;
  int substeps(double field, double dt) const;

  ModelParams params_;
  Matrix4c hamiltonian_;
  Matrix4c control_;
  Matrix4c decay_;  // sum_k kappa L^+ L
  std::vector<Matrix4c> jumps_;  // sqrt(kappa) L
};

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  ModelParams params;
  ControlField field;
};

/// Solves the master equation on the field's grid, storing every
/// `store_every`-th state plus the final one.
///
/// Throws NumericalError if a stored state has an eigenvalue below -1e-6.
Trajectory propagate(const DensityMatrix& rho0, const ControlField& field, const ModelParams& p,
                     int store_every = 1);

/// Final state only, without per-step checks.
Matrix4c propagate_final(const Matrix4c& rho0, const ControlField& field, const Liouvillian& lv);

/// 1 - <0| Tr_TLS rho |0>.
double reset_error(const DensityMatrix& rho);
double reset_error(const Matrix4c& rho);

struct Populations {
  std::vector<double> qubit;  // ground-state population
  std::vector<double> tls;
};

Populations populations(const Trajectory& traj);

struct VolumeSeries {
  std::vector<double> times;
  std::vector<double> volume;
};

/// |det| of the linear part of the qubit's Bloch-vector map
/// rho_Q(0) -> Tr_TLS[rho(t)] for initial states rho_Q(0) (x) rho_tls0.
///
/// Each requested time is rounded to the nearest grid point.
VolumeSeries dynamical_map_volume(const ControlField& field, const ModelParams& p,
                                  const DensityMatrix& rho_tls0, std::span<const double> times);

/// Every grid point of the field.
VolumeSeries dynamical_map_volume(const ControlField& field, const ModelParams& p,
                                  const DensityMatrix& rho_tls0);

/// CSV with columns t, pQ, pTLS, purity_Q, epsilon, MI.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace qreset
