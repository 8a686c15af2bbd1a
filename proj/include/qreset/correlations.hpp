#pragma once

#include <optional>

#include "qreset/linalg.hpp"

namespace qreset {

struct CorrelationReport {
  double mutual_information = 0.0;  // bits
  std::optional<double> discord;    // bits; absent when the state is not X-shaped
  double concurrence = 0.0;
};

/// S(rho_Q) + S(rho_TLS) - S(rho), in bits.
double mutual_information(const DensityMatrix& rho);

/// True when every entry outside the diagonal and anti-diagonal is below tol.
bool is_x_state(const ComplexMatrix& rho, double tol = 1e-10);

/// Quantum discord of a two-qubit X state, measuring the TLS (second factor).
///
/// Classical correlations are maximized over the two candidate measurement
/// axes of the X-state analysis: sz and the in-plane axis aligned with the
/// coherences. Throws std::invalid_argument for non-X input.
double quantum_discord_xstate(const DensityMatrix& rho);

/// Discord with the conditional entropy minimized numerically over all
/// projective measurements on the TLS (sphere grid plus local refinement).
/// Valid for any two-qubit state; used to cross-check the X-state form.
double quantum_discord_numeric(const DensityMatrix& rho, int grid = 64);

/// Conditional entropy S(Q | projective measurement of the TLS along axis).
double measured_conditional_entropy(const DensityMatrix& rho, const Eigen::Vector3d& axis);

/// Wootters concurrence.
double concurrence(const DensityMatrix& rho);

CorrelationReport correlation_report(const DensityMatrix& rho);

}  // namespace qreset
