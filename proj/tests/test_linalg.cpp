#include <gtest/gtest.h>

#include <cmath>

#include <random>

#include "qreset/linalg.hpp"
#include "qreset/model.hpp"
#include "test_util.hpp"

using namespace qreset;
using qreset::testing::bell_state;
using qreset::testing::random_hermitian;
using qreset::testing::random_state;
using qreset::testing::random_unitary;

TEST(DensityMatrix, AcceptsValidStates) {
  EXPECT_NO_THROW(DensityMatrix(ComplexMatrix::Identity(4, 4) / 4.0));
  EXPECT_NO_THROW(DensityMatrix(ComplexMatrix::Identity(2, 2) / 2.0));
  EXPECT_EQ(DensityMatrix(ComplexMatrix::Identity(4, 4) / 4.0).matrix().size(), 16);
}

TEST(DensityMatrix, RejectsBrokenInvariants) {
  ComplexMatrix non_herm = ComplexMatrix::Identity(2, 2) / 2.0;
  non_herm(0, 1) = Complex(0.0, 0.1);
  EXPECT_THROW(DensityMatrix{non_herm}, InvalidStateError);

  EXPECT_THROW(DensityMatrix{ComplexMatrix::Identity(2, 2)}, InvalidStateError);

  ComplexMatrix negative = ComplexMatrix::Zero(2, 2);
  negative(0, 0) = 1.1;
  negative(1, 1) = -0.1;
  EXPECT_THROW(DensityMatrix{negative}, InvalidStateError);

  EXPECT_THROW(DensityMatrix{ComplexMatrix::Identity(3, 3) / 3.0}, InvalidStateError);
}

TEST(TensorProduct, Examples) {
  EXPECT_LT(max_abs(tensor_product(pauli::identity(), pauli::identity()) - ComplexMatrix::Identity(4, 4)), 1e-15);

  Eigen::Vector4cd diag(1, 1, -1, -1);
  EXPECT_LT(max_abs(tensor_product(pauli::z(), pauli::identity()) - ComplexMatrix(diag.asDiagonal())), 1e-15);

  // (s+ (x) s-) |1>|0> = |0>|1>
  Eigen::Vector4cd ket10 = Eigen::Vector4cd::Zero();
  ket10(2) = 1.0;
  Eigen::Vector4cd ket01 = Eigen::Vector4cd::Zero();
  ket01(1) = 1.0;
  const Eigen::VectorXcd out = tensor_product(pauli::plus(), pauli::minus()) * ket10;
  EXPECT_LT((out - ket01).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(PartialTrace, ProductStateMarginals) {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 20; ++k) {
    const DensityMatrix a = random_state(rng, 2);
    const DensityMatrix b = random_state(rng, 2);
    const DensityMatrix ab(tensor_product(a.matrix(), b.matrix()));
    EXPECT_LT(max_abs(partial_trace_tls(ab).matrix() - a.matrix()), 1e-14);
    EXPECT_LT(max_abs(partial_trace_qubit(ab).matrix() - b.matrix()), 1e-14);
  }
}

TEST(PartialTrace, ConsistentWithTensorProductForArbitraryMatrices) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 20; ++k) {
    const ComplexMatrix a = qreset::testing::random_complex(rng, 2);
    const ComplexMatrix b = qreset::testing::random_complex(rng, 2);
    const ComplexMatrix ab = tensor_product(a, b);
    EXPECT_LT(max_abs(partial_trace_tls(ab) - a * b.trace()), 1e-12);
    EXPECT_LT(max_abs(partial_trace_qubit(ab) - b * a.trace()), 1e-12);
  }
}

TEST(PartialTrace, BellMarginalsAreMaximallyMixed) {
  const ComplexMatrix half = ComplexMatrix::Identity(2, 2) / 2.0;
  EXPECT_LT(max_abs(partial_trace_tls(bell_state()).matrix() - half), 1e-15);
  EXPECT_LT(max_abs(partial_trace_qubit(bell_state()).matrix() - half), 1e-15);
}

TEST(PartialTrace, BenchmarkStates) {
  const ModelParams p = benchmark_params();
  EXPECT_NEAR(partial_trace_tls(joint_thermal_state(p))(0, 0).real(), 0.7305, 5e-4);
  EXPECT_NEAR(partial_trace_qubit(factorizing_initial_state(p))(0, 0).real(), 0.953, 5e-4);
}

TEST(Purity, Examples) {
  ComplexMatrix proj = ComplexMatrix::Zero(2, 2);
  proj(0, 0) = 1.0;
  EXPECT_NEAR(purity(DensityMatrix(proj)), 1.0, 1e-15);
  EXPECT_NEAR(purity(DensityMatrix(ComplexMatrix::Identity(2, 2) / 2.0)), 0.5, 1e-15);
  // a^2 + b^2 with a = 1/(1 + e^-3) is 0.90965; the often quoted 0.9105 is an arithmetic slip.
  const double a = 1.0 / (1.0 + std::exp(-3.0));
  EXPECT_NEAR(purity(thermal_two_level(3.0, 1.0)), a * a + (1 - a) * (1 - a), 1e-14);
  EXPECT_NEAR(purity(thermal_two_level(3.0, 1.0)), 0.90965, 1e-5);
}

TEST(Purity, UnitarilyInvariant) {
  std::mt19937_64 rng(13);
  for (int k = 0; k < 50; ++k) {
    const DensityMatrix rho = random_state(rng, 4);
    const ComplexMatrix u = random_unitary(rng, 4);
    const ComplexMatrix rotated = u * rho.matrix() * u.adjoint();
    const DensityMatrix rho_u(ComplexMatrix(0.5 * (rotated + rotated.adjoint())));
    EXPECT_NEAR(purity(rho_u), purity(rho), 1e-12);
  }
}

TEST(Entropy, Examples) {
  ComplexMatrix proj = ComplexMatrix::Zero(4, 4);
  proj(2, 2) = 1.0;
  EXPECT_NEAR(von_neumann_entropy(DensityMatrix(proj)), 0.0, 1e-15);
  EXPECT_NEAR(von_neumann_entropy(DensityMatrix(ComplexMatrix::Identity(4, 4) / 4.0)), 2.0, 1e-14);
  // Binary entropy of p = 1/(1 + e^-1) in bits is 0.83994 (0.8402 carries a rounding slip).
  const double p = 1.0 / (1.0 + std::exp(-1.0));
  EXPECT_NEAR(von_neumann_entropy(thermal_two_level(1.0, 1.0)),
              -(p * std::log2(p) + (1 - p) * std::log2(1 - p)), 1e-12);
  EXPECT_NEAR(von_neumann_entropy(thermal_two_level(1.0, 1.0)), 0.8402, 3e-4);
}

TEST(Entropy, UnitaryInvarianceAndAdditivity) {
  std::mt19937_64 rng(17);
  for (int k = 0; k < 50; ++k) {
    const DensityMatrix a = random_state(rng, 2);
    const DensityMatrix b = random_state(rng, 2);
    const DensityMatrix ab(tensor_product(a.matrix(), b.matrix()));
    EXPECT_NEAR(von_neumann_entropy(ab), von_neumann_entropy(a) + von_neumann_entropy(b), 1e-9);

    const ComplexMatrix u = random_unitary(rng, 4);
    const ComplexMatrix rotated = u * ab.matrix() * u.adjoint();
    EXPECT_NEAR(von_neumann_entropy(DensityMatrix(ComplexMatrix(0.5 * (rotated + rotated.adjoint())))),
                von_neumann_entropy(ab), 1e-9);
  }
}

TEST(Entropy, ClipsRoundOffButRejectsNegativeMass) {
  Eigen::VectorXd tiny(2);
  tiny << 1.0 + 5e-11, -5e-11;
  EXPECT_NEAR(entropy_bits(tiny), 0.0, 1e-9);
  Eigen::VectorXd bad(2);
  bad << 1.01, -0.01;
  EXPECT_THROW(entropy_bits(bad), std::invalid_argument);
}

TEST(Eigensystem, Examples) {
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 0.25;
  d(1, 1) = 0.75;
  const Eigensystem es = hermitian_eigensystem(d);
  EXPECT_NEAR(es.values(0), 0.75, 1e-15);
  EXPECT_NEAR(es.values(1), 0.25, 1e-15);

  const Eigensystem sx = hermitian_eigensystem(pauli::x());
  EXPECT_NEAR(sx.values(0), 1.0, 1e-15);
  EXPECT_NEAR(sx.values(1), -1.0, 1e-15);

  ModelParams p = benchmark_params();
  p.omega_tls = 1.0;
  const DensityMatrix rho = correlated_initial_state(p, -0.19);
  const Eigensystem mid = hermitian_eigensystem(rho.matrix().block(1, 1, 2, 2));
  EXPECT_NEAR(mid.values(0), 0.3866, 1e-4);
  EXPECT_NEAR(mid.values(1), 0.0066, 1e-4);
}

TEST(Eigensystem, ReconstructsRandomHermitianMatrices) {
  std::mt19937_64 rng(19);
  for (int k = 0; k < 1000; ++k) {
    const int n = (k % 2 == 0) ? 2 : 4;
    const ComplexMatrix m = random_hermitian(rng, n);
    const Eigensystem es = hermitian_eigensystem(m);
    for (int i = 1; i < n; ++i) ASSERT_GE(es.values(i - 1), es.values(i));
    const ComplexMatrix v = es.vectors;
    ASSERT_LT(max_abs(v.adjoint() * v - ComplexMatrix::Identity(n, n)), 1e-12);
    const ComplexMatrix back = v * es.values.cast<Complex>().asDiagonal() * v.adjoint();
    ASSERT_LT(max_abs(back - m), 1e-12 * (1.0 + max_abs(m)));
  }
}

TEST(Eigensystem, RejectsNonHermitianInput) {
  ComplexMatrix m = pauli::x();
  m(0, 1) = 2.0;
  EXPECT_THROW(hermitian_eigensystem(m), std::invalid_argument);
}
