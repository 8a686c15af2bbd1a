#include "qreset/model.hpp"

#include <cmath>
#include <sstream>

namespace qreset {

void ModelParams::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("ModelParams: " + msg); };
  if (!(omega_q > 0.0)) fail("omega_q must be positive");
  if (!(omega_tls > 0.0)) fail("omega_tls must be positive");
  if (!(coupling >= 0.0)) fail("coupling must be non-negative");
  if (!(kappa >= 0.0)) fail("kappa must be non-negative");
  if (!(beta > 0.0)) fail("beta must be positive");
  if (!(coupling < omega_tls)) fail("coupling must be smaller than omega_tls");
}

ModelParams benchmark_params() { return ModelParams{}; }

ControlField::ControlField(double t_final, std::vector<double> values)
    : t_final_(t_final), values_(std::move(values)) {
  if (!(t_final_ > 0.0)) throw std::invalid_argument("ControlField: t_final must be positive");
  if (values_.empty()) throw std::invalid_argument("ControlField: need at least one step");
}

ControlField ControlField::zeros(double t_final, int n_steps) {
  if (n_steps <= 0) throw std::invalid_argument("ControlField: n_steps must be positive");
  return ControlField(t_final, std::vector<double>(static_cast<std::size_t>(n_steps), 0.0));
}

double ControlField::at_grid_point(int k) const {
  const int j = std::min(k, n_steps() - 1);
  return values_[static_cast<std::size_t>(std::max(j, 0))];
}

ControlField ControlField::scaled(double factor) const {
  ControlField out = *this;
  for (double& v : out.values_) v *= factor;
  return out;
}

DensityMatrix thermal_two_level(double omega, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("thermal_two_level: beta must be positive");
  const double x = 0.5 * omega * beta;
  // e^x / (2 cosh x) written without overflow
  const double ground = 1.0 / (1.0 + std::exp(-2.0 * x));
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = ground;
  m(1, 1) = 1.0 - ground;
  return DensityMatrix(std::move(m));
}

DensityMatrix factorizing_initial_state(const ModelParams& p) {
  return DensityMatrix(tensor_product(thermal_two_level(p.omega_q, p.beta).matrix(),
                                      thermal_two_level(p.omega_tls, p.beta).matrix()));
}

DensityMatrix joint_thermal_state(const ModelParams& p) {
  const double J = p.coupling;
  const double d_plus = p.omega_q + p.omega_tls;
  const double d_minus = p.omega_q - p.omega_tls;
  const double big_plus = std::sqrt(d_plus * d_plus + 4.0 * J * J);
  const double big_minus = std::sqrt(d_minus * d_minus + 4.0 * J * J);
  const double x_plus = 0.5 * big_plus * p.beta;
  const double x_minus = 0.5 * big_minus * p.beta;

  const double lambda_p = std::cosh(x_plus) + d_plus / big_plus * std::sinh(x_plus);
  const double lambda_m = std::cosh(x_plus) - d_plus / big_plus * std::sinh(x_plus);
  // big_minus vanishes only at resonance with J = 0, where the sinh term is 0
  const double ratio_minus = big_minus > 0.0 ? d_minus / big_minus : 0.0;
  const double mu_p = std::cosh(x_minus) + ratio_minus * std::sinh(x_minus);
  const double mu_m = std::cosh(x_minus) - ratio_minus * std::sinh(x_minus);
  const double zeta_p = -2.0 * J / big_plus * std::sinh(x_plus);
  const double zeta_m = big_minus > 0.0 ? -2.0 * J / big_minus * std::sinh(x_minus) : 0.0;
  const double Z = 2.0 * (std::cosh(x_plus) + std::cosh(x_minus));

  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 0) = lambda_p;
  m(1, 1) = mu_p;
  m(2, 2) = mu_m;
  m(3, 3) = lambda_m;
  m(0, 3) = m(3, 0) = zeta_p;
  m(1, 2) = m(2, 1) = zeta_m;
  return DensityMatrix(m / Z);
}

DensityMatrix rwa_joint_thermal_state(const ModelParams& p) {
  const double J = p.coupling;
  const double delta = p.omega_q - p.omega_tls;
  const double phi = 0.5 * (p.omega_q + p.omega_tls) * p.beta;
  const double big = std::sqrt(delta * delta + 4.0 * J * J);
  const double x = 0.5 * big * p.beta;
  const double lambda = std::cosh(x);
  const double mu = std::sinh(x);
  const double ratio = big > 0.0 ? delta / big : 0.0;
  const double off = big > 0.0 ? -2.0 * J / big * mu : 0.0;
  const double Z = 2.0 * std::cosh(phi) + 2.0 * std::cosh(x);

  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 0) = std::exp(phi);
  m(1, 1) = lambda + ratio * mu;
  m(2, 2) = lambda - ratio * mu;
  m(3, 3) = std::exp(-phi);
  m(1, 2) = m(2, 1) = off;
  return DensityMatrix(m / Z);
}

double correlation_bound(const ModelParams& p) {
  const auto rho = factorizing_initial_state(p);
  return std::sqrt(rho(1, 1).real() * rho(2, 2).real());
}

DensityMatrix correlated_initial_state(const ModelParams& p, double gamma) {
  if (gamma > 0.0) {
    throw std::invalid_argument("correlated_initial_state: gamma must be real and <= 0");
  }
  const double bound = correlation_bound(p);
  if (std::abs(gamma) > bound) {
    std::ostringstream os;
    os << "correlated_initial_state: |gamma| = " << std::abs(gamma)
       << " exceeds the positivity bound " << bound;
    throw std::invalid_argument(os.str());
  }
  ComplexMatrix m = factorizing_initial_state(p).matrix();
  m(1, 2) += gamma;
  m(2, 1) += gamma;
  return DensityMatrix(std::move(m));
}

namespace {

Matrix4c kron(const Matrix2c& a, const Matrix2c& b) { return tensor_product(a, b); }

}  // namespace

Matrix4c static_hamiltonian(const ModelParams& p) {
  const Matrix2c I = pauli::identity();
  Matrix4c h = -0.5 * p.omega_q * kron(pauli::z(), I) - 0.5 * p.omega_tls * kron(I, pauli::z());
  if (p.rwa) {
    h += p.coupling * (kron(pauli::plus(), pauli::minus()) + kron(pauli::minus(), pauli::plus()));
  } else {
    h += p.coupling * kron(pauli::x(), pauli::x());
  }
  return h;
}

Matrix4c control_operator(const ModelParams& p) {
  const Matrix2c axis = p.control == ControlAxis::z ? pauli::z() : pauli::x();
  return -0.5 * kron(axis, pauli::identity());
}

Matrix4c hamiltonian(const ModelParams& p, double field) {
  return static_hamiltonian(p) + field * control_operator(p);
}

double thermal_occupation(const ModelParams& p) {
  return 1.0 / std::expm1(p.beta * p.omega_tls);
}

std::vector<LindbladTerm> lindblad_ops(const ModelParams& p) {
  if (!(p.beta > 0.0)) throw std::invalid_argument("lindblad_ops: beta must be positive");
  const double n = thermal_occupation(p);
  const Matrix2c I = pauli::identity();
  return {
      {std::sqrt(n + 1.0) * kron(I, pauli::lowering()), p.kappa},
      {std::sqrt(n) * kron(I, pauli::raising()), p.kappa},
  };
}

}  // namespace qreset
