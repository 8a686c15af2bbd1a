#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qreset {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using Matrix4c = Eigen::Matrix4cd;
using Matrix2c = Eigen::Matrix2cd;

/// Tolerances a DensityMatrix is checked against on construction.
struct StateTolerance {
  double hermiticity = 1e-12;
  double trace = 1e-10;
  double negativity = 1e-10;
};

/// Tolerance used for states produced by numerical integration.
inline constexpr StateTolerance kIntegratedStateTolerance{1e-8, 1e-8, 1e-8};

/// Thrown when a matrix fails the density-matrix invariants.
class InvalidStateError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Hermitian, unit-trace, positive-semidefinite matrix of dimension 2 or 4.
///
/// The qubit is the first tensor factor; basis order is |00>, |01>, |10>, |11>
/// with |0> the ground state of each two-level system.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix m, const StateTolerance& tol = {});

  const ComplexMatrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  Complex operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  Matrix4c as4() const;

 private:
  ComplexMatrix m_;
};

namespace pauli {
Matrix2c identity();
Matrix2c x();
Matrix2c y();
Matrix2c z();
/// Textbook matrix [[0,1],[0,0]] = |0><1|.
Matrix2c plus();
/// Textbook matrix [[0,0],[1,0]] = |1><0|.
Matrix2c minus();
/// Energy-lowering operator |0><1|. The ground state |0> is the +1
/// eigenstate of sz because every splitting enters as H = -(w/2) sz.
Matrix2c lowering();
/// Energy-raising operator |1><0|.
Matrix2c raising();
}  // namespace pauli

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b);

/// Traces out the second tensor factor (the TLS) of a 4x4 matrix.
ComplexMatrix partial_trace_tls(const ComplexMatrix& m);
/// Traces out the first tensor factor (the qubit) of a 4x4 matrix.
ComplexMatrix partial_trace_qubit(const ComplexMatrix& m);

DensityMatrix partial_trace_tls(const DensityMatrix& rho);
DensityMatrix partial_trace_qubit(const DensityMatrix& rho);

double purity(const DensityMatrix& rho);

/// Entropy in bits. Eigenvalues in [-1e-10, 0) are clipped to zero.
double von_neumann_entropy(const DensityMatrix& rho);

/// Entropy in bits of a probability spectrum; same clipping rule.
double entropy_bits(const Eigen::VectorXd& spectrum);

struct Eigensystem {
  Eigen::VectorXd values;   // descending
  ComplexMatrix vectors;    // columns, orthonormal
};

/// Throws std::invalid_argument when m is not Hermitian within 1e-10.
Eigensystem hermitian_eigensystem(const ComplexMatrix& m);

/// Largest absolute entry.
double max_abs(const ComplexMatrix& m);

}  // namespace qreset
