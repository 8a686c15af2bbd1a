#include "qreset/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qreset {

namespace {

constexpr double kEigenClip = 1e-10;

void require_square(const ComplexMatrix& m, Eigen::Index dim, const char* what) {
  if (m.rows() != dim || m.cols() != dim) {
    std::ostringstream os;
    os << what << ": expected " << dim << "x" << dim << " matrix, got " << m.rows() << "x"
       << m.cols();
    throw std::invalid_argument(os.str());
  }
}

}  // namespace

double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

DensityMatrix::DensityMatrix(ComplexMatrix m, const StateTolerance& tol) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || (m_.rows() != 2 && m_.rows() != 4)) {
    std::ostringstream os;
    os << "density matrix must be 2x2 or 4x4, got " << m_.rows() << "x" << m_.cols();
    throw InvalidStateError(os.str());
  }
  const double herm = max_abs(m_ - m_.adjoint());
  if (herm > tol.hermiticity) {
    std::ostringstream os;
    os << "density matrix not Hermitian (deviation " << herm << ")";
    throw InvalidStateError(os.str());
  }
  const Complex tr = m_.trace();
  if (std::abs(tr - 1.0) > tol.trace) {
    std::ostringstream os;
    os << "density matrix trace " << tr.real() << " differs from 1";
    throw InvalidStateError(os.str());
  }
  const ComplexMatrix h = 0.5 * (m_ + m_.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::EigenvaluesOnly);
  const double lowest = solver.eigenvalues().minCoeff();
  if (lowest < -tol.negativity) {
    std::ostringstream os;
    os << "density matrix has negative eigenvalue " << lowest;
    throw InvalidStateError(os.str());
  }
}

Matrix4c DensityMatrix::as4() const {
  require_square(m_, 4, "DensityMatrix::as4");
  return m_;
}

namespace pauli {

Matrix2c identity() { return Matrix2c::Identity(); }

Matrix2c x() {
  Matrix2c m;
  m << 0, 1, 1, 0;
  return m;
}

Matrix2c y() {
  Matrix2c m;
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

Matrix2c z() {
  Matrix2c m;
  m << 1, 0, 0, -1;
  return m;
}

Matrix2c plus() {
  Matrix2c m;
  m << 0, 1, 0, 0;
  return m;
}

Matrix2c minus() {
  Matrix2c m;
  m << 0, 0, 1, 0;
  return m;
}

Matrix2c lowering() { return plus(); }
Matrix2c raising() { return minus(); }

}  // namespace pauli

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix partial_trace_tls(const ComplexMatrix& m) {
  require_square(m, 4, "partial_trace_tls");
  ComplexMatrix out(2, 2);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      out(i, j) = m(2 * i, 2 * j) + m(2 * i + 1, 2 * j + 1);
    }
  }
  return out;
}

ComplexMatrix partial_trace_qubit(const ComplexMatrix& m) {
  require_square(m, 4, "partial_trace_qubit");
  ComplexMatrix out(2, 2);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      out(i, j) = m(i, j) + m(2 + i, 2 + j);
    }
  }
  return out;
}

DensityMatrix partial_trace_tls(const DensityMatrix& rho) {
  return DensityMatrix(partial_trace_tls(rho.matrix()), kIntegratedStateTolerance);
}

DensityMatrix partial_trace_qubit(const DensityMatrix& rho) {
  return DensityMatrix(partial_trace_qubit(rho.matrix()), kIntegratedStateTolerance);
}

double purity(const DensityMatrix& rho) {
  // trace(rho^2) = sum |rho_ij|^2 for Hermitian rho
  return rho.matrix().cwiseAbs2().sum();
}

double entropy_bits(const Eigen::VectorXd& spectrum) {
  double s = 0.0;
  for (double p : spectrum) {
    if (p < -kEigenClip) {
      std::ostringstream os;
      os << "negative eigenvalue " << p << " in entropy";
      throw InvalidStateError(os.str());
    }
    if (p > 0.0) s -= p * std::log2(p);
  }
  return s;
}

double von_neumann_entropy(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(rho.matrix(), Eigen::EigenvaluesOnly);
  return entropy_bits(solver.eigenvalues());
}

Eigensystem hermitian_eigensystem(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("hermitian_eigensystem: matrix not square");
  const double herm = max_abs(m - m.adjoint());
  if (herm > 1e-10) {
    std::ostringstream os;
    os << "hermitian_eigensystem: matrix not Hermitian (deviation " << herm << ")";
    throw std::invalid_argument(os.str());
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(0.5 * (m + m.adjoint()));
  const Eigen::Index n = m.rows();
  Eigensystem out{Eigen::VectorXd(n), ComplexMatrix(n, n)};
  // Eigen returns ascending order
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = solver.eigenvalues()(n - 1 - k);
    out.vectors.col(k) = solver.eigenvectors().col(n - 1 - k);
  }
  return out;
}

}  // namespace qreset
