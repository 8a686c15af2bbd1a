#include "qreset/correlations.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

namespace qreset {

double mutual_information(const DensityMatrix& rho) {
  const double mi = von_neumann_entropy(partial_trace_tls(rho)) +
                    von_neumann_entropy(partial_trace_qubit(rho)) - von_neumann_entropy(rho);
  return std::max(mi, 0.0);
}

bool is_x_state(const ComplexMatrix& rho, double tol) {
  if (rho.rows() != 4 || rho.cols() != 4) return false;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (i == j || i + j == 3) continue;
      if (std::abs(rho(i, j)) > tol) return false;
    }
  }
  return true;
}

double measured_conditional_entropy(const DensityMatrix& rho, const Eigen::Vector3d& axis) {
  const Eigen::Vector3d n = axis.normalized();
  const Matrix2c n_sigma = n(0) * pauli::x() + n(1) * pauli::y() + n(2) * pauli::z();
  const Matrix2c I = pauli::identity();
  double s = 0.0;
  for (double sign : {1.0, -1.0}) {
    const Matrix2c proj = 0.5 * (I + sign * n_sigma);
    const Matrix4c lifted = tensor_product(I, proj);
    const ComplexMatrix conditioned = partial_trace_tls(ComplexMatrix(lifted * rho.as4() * lifted));
    const double prob = conditioned.trace().real();
    if (prob <= 1e-15) continue;
    Eigen::SelfAdjointEigenSolver<Matrix2c> solver(conditioned / prob, Eigen::EigenvaluesOnly);
    Eigen::VectorXd spectrum = solver.eigenvalues().cwiseMax(0.0);
    s += prob * entropy_bits(spectrum);
  }
  return s;
}

namespace {

// Discord = S(rho_TLS) - S(rho) + min conditional entropy.
double discord_from_conditional(const DensityMatrix& rho, double min_conditional) {
  const double d = von_neumann_entropy(partial_trace_qubit(rho)) - von_neumann_entropy(rho) +
                   min_conditional;
  return std::max(d, 0.0);
}

Eigen::Vector3d spherical(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

}  // namespace

double quantum_discord_xstate(const DensityMatrix& rho) {
  if (!is_x_state(rho.matrix())) {
    throw std::invalid_argument("quantum_discord_xstate: state is not an X state");
  }
  // Local phase rotations make both coherences real; discord is invariant.
  const double alpha = std::arg(rho(0, 3));
  const double beta = std::arg(rho(1, 2));
  const double theta_q = 0.5 * (alpha + beta);
  const double theta_tls = 0.5 * (alpha - beta);
  Matrix2c uq = Matrix2c::Identity();
  Matrix2c ut = Matrix2c::Identity();
  uq(1, 1) = std::polar(1.0, theta_q);
  ut(1, 1) = std::polar(1.0, theta_tls);
  const Matrix4c u = tensor_product(uq, ut);
  ComplexMatrix real_form = u * rho.as4() * u.adjoint();
  real_form = 0.5 * (real_form + real_form.adjoint()).eval();
  const DensityMatrix aligned(real_form, kIntegratedStateTolerance);

  const double z_branch = measured_conditional_entropy(aligned, Eigen::Vector3d::UnitZ());
  const double x_branch = measured_conditional_entropy(aligned, Eigen::Vector3d::UnitX());
  return discord_from_conditional(aligned, std::min(z_branch, x_branch));
}

double quantum_discord_numeric(const DensityMatrix& rho, int grid) {
  grid = std::max(grid, 4);
  double best = std::numeric_limits<double>::infinity();
  double best_theta = 0.0;
  double best_phi = 0.0;
  const double pi = std::numbers::pi;
  // Projective measurements along n and -n coincide, so a hemisphere suffices.
  for (int i = 0; i <= grid; ++i) {
    const double theta = 0.5 * pi * i / grid;
    const int n_phi = i == 0 ? 1 : 2 * grid;
    for (int k = 0; k < n_phi; ++k) {
      const double phi = 2.0 * pi * k / n_phi;
      const double s = measured_conditional_entropy(rho, spherical(theta, phi));
      if (s < best) {
        best = s;
        best_theta = theta;
        best_phi = phi;
      }
    }
  }
  // Pattern search refinement around the best grid point.
  double step = 0.5 * pi / grid;
  while (step > 1e-9) {
    bool improved = false;
    for (auto [dt, dp] : {std::pair{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}}) {
      const double theta = best_theta + dt * step;
      const double phi = best_phi + dp * step;
      const double s = measured_conditional_entropy(rho, spherical(theta, phi));
      if (s < best) {
        best = s;
        best_theta = theta;
        best_phi = phi;
        improved = true;
      }
    }
    if (!improved) step *= 0.5;
  }
  return discord_from_conditional(rho, best);
}

double concurrence(const DensityMatrix& rho) {
  const Matrix4c yy = tensor_product(pauli::y(), pauli::y());
  const Matrix4c r = rho.as4();
  const Matrix4c flipped = yy * r.conjugate() * yy;
  // Eigenvalues of sqrt(rho) flipped sqrt(rho) equal those of rho * flipped.
  Eigen::SelfAdjointEigenSolver<Matrix4c> rs(0.5 * (r + r.adjoint()));
  const Eigen::Vector4d ev = rs.eigenvalues().cwiseMax(0.0);
  const Matrix4c sqrt_rho = rs.eigenvectors() * ev.cwiseSqrt().asDiagonal() * rs.eigenvectors().adjoint();
  const Matrix4c h = sqrt_rho * flipped * sqrt_rho;
  Eigen::SelfAdjointEigenSolver<Matrix4c> hs(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
  Eigen::Vector4d lambda = hs.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  std::sort(lambda.data(), lambda.data() + 4, std::greater<>());
  return std::clamp(lambda(0) - lambda(1) - lambda(2) - lambda(3), 0.0, 1.0);
}

CorrelationReport correlation_report(const DensityMatrix& rho) {
  CorrelationReport r;
  r.mutual_information = mutual_information(rho);
  r.concurrence = concurrence(rho);
  if (is_x_state(rho.matrix())) r.discord = quantum_discord_xstate(rho);
  return r;
}

}  // namespace qreset
