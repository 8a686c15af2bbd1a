#pragma once

#include <optional>
#include <vector>

#include "qreset/linalg.hpp"

namespace qreset {

/// Which qubit operator the control field couples to.
enum class ControlAxis { z, x };

/// Physical constants in units hbar = omega_Q = 1.
struct ModelParams {
  double omega_q = 1.0;
  double omega_tls = 3.0;
  double coupling = 0.1;  // J
  double kappa = 0.04;
  double beta = 1.0;
  bool rwa = false;
  ControlAxis control = ControlAxis::z;

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

/// omega_Q = 1, omega_TLS = 3, J = 0.1, kappa = 0.04, beta = 1.
ModelParams benchmark_params();

/// Real control field held constant on each interval of a uniform grid.
///
/// values[j] is the field on [j dt, (j+1) dt], i.e. it is sampled at the
/// interval midpoint (j + 1/2) dt.
class ControlField {
 public:
  ControlField(double t_final, std::vector<double> values);
  /// Samples f at the midpoints of an n_steps grid.
  template <class F>
  static ControlField sample(double t_final, int n_steps, F&& f) {
    std::vector<double> v(static_cast<std::size_t>(n_steps));
    const double dt = t_final / n_steps;
    for (int j = 0; j < n_steps; ++j) v[static_cast<std::size_t>(j)] = f((j + 0.5) * dt);
    return ControlField(t_final, std::move(v));
  }
  static ControlField zeros(double t_final, int n_steps);

  double t_final() const { return t_final_; }
  int n_steps() const { return static_cast<int>(values_.size()); }
  double dt() const { return t_final_ / static_cast<double>(values_.size()); }
  double midpoint(int j) const { return (j + 0.5) * dt(); }
  double operator[](int j) const { return values_[static_cast<std::size_t>(j)]; }
  double& operator[](int j) { return values_[static_cast<std::size_t>(j)]; }
  const std::vector<double>& values() const { return values_; }
  /// Field in effect at grid time t_k = k dt; the last interval's value at T.
  double at_grid_point(int k) const;
  ControlField scaled(double factor) const;

  /// Ramp duration used to build the field, when known.
  std::optional<double> t_ramp;

 private:
  double t_final_;
  std::vector<double> values_;
};

/// diag(e^x, e^-x) / (2 cosh x) with x = omega beta / 2.
DensityMatrix thermal_two_level(double omega, double beta);

/// Product of the thermal qubit and thermal TLS states.
DensityMatrix factorizing_initial_state(const ModelParams& p);

/// Joint Gibbs state of qubit and TLS under the full (non-RWA) static
/// Hamiltonian, from its closed form.
DensityMatrix joint_thermal_state(const ModelParams& p);

/// Joint Gibbs state under the RWA static Hamiltonian.
DensityMatrix rwa_joint_thermal_state(const ModelParams& p);

/// Largest |gamma| that keeps the correlated state positive.
double correlation_bound(const ModelParams& p);

/// Factorizing state plus a real gamma <= 0 on the |01><10| coherence.
/// Throws std::invalid_argument when gamma > 0 or |gamma| exceeds the bound.
DensityMatrix correlated_initial_state(const ModelParams& p, double gamma);

/// Field-independent part of the Hamiltonian (field = 0).
Matrix4c static_hamiltonian(const ModelParams& p);
/// dH/d(field); constant because H is affine in the field.
Matrix4c control_operator(const ModelParams& p);
/// Full Hamiltonian at field value `field`.
Matrix4c hamiltonian(const ModelParams& p, double field);

struct LindbladTerm {
  Matrix4c op;
  double rate;
};

/// Thermal emission and absorption of the TLS, both at rate kappa.
std::vector<LindbladTerm> lindblad_ops(const ModelParams& p);

/// Bose occupation 1 / (e^{beta omega_TLS} - 1).
double thermal_occupation(const ModelParams& p);

}  // namespace qreset
