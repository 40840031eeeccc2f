#include <cmath>

#include <gtest/gtest.h>

#include "pauliprop/ensemble.hpp"
#include "pauliprop/oracle.hpp"
#include "pauliprop/topology.hpp"

using namespace pauliprop;

TEST(StateVector, CapIsEnforced) {
  EXPECT_NO_THROW(StateVector{kOracleMaxQubits});
  EXPECT_THROW(StateVector{kOracleMaxQubits + 1}, OracleCapExceeded);
}

TEST(StateVector, QubitZeroIsLowestBit) {
  auto sv = StateVector::product(ProductState::zero_state(3));
  sv.apply(Gate::clifford(CliffordKind::X, Support(2)));
  EXPECT_EQ(sv.amplitudes()[4], Complex(1.0, 0.0));
  EXPECT_EQ(sv.expectation(PauliString::parse("IIZ")), -1.0);
  EXPECT_EQ(sv.expectation(PauliString::parse("ZII")), 1.0);
}

TEST(StateVector, BellCorrelations) {
  auto sv = StateVector::product(ProductState::zero_state(2));
  sv.apply(Gate::clifford(CliffordKind::H, Support(0)));
  sv.apply(Gate::clifford(CliffordKind::CNOT, Support(0, 1)));
  EXPECT_NEAR(sv.expectation(PauliString::parse("ZZ")), 1.0, 1e-15);
  EXPECT_NEAR(sv.expectation(PauliString::parse("XX")), 1.0, 1e-15);
  EXPECT_NEAR(sv.expectation(PauliString::parse("YY")), -1.0, 1e-15);
  EXPECT_NEAR(sv.expectation(PauliString::parse("ZI")), 0.0, 1e-15);
  EXPECT_NEAR(sv.norm(), 1.0, 1e-15);
}

TEST(StateVector, TwoQubitMatrixOrderFollowsSupport) {
  // CNOT with control 1 and target 0: the first support qubit is the control.
  auto sv = StateVector::product(ProductState::zero_state(2));
  sv.apply(Gate::clifford(CliffordKind::X, Support(1)));
  sv.apply(Gate::clifford(CliffordKind::CNOT, Support(1, 0)));
  EXPECT_EQ(sv.amplitudes()[3], Complex(1.0, 0.0));
}

TEST(StateVector, RotationExpectations) {
  const double t = 0.9;
  Circuit rx(1, {Layer({Gate::rotation("X", t, Support(0))})});
  Circuit ry(1, {Layer({Gate::rotation("Y", t, Support(0))})});
  const auto rho = ProductState::zero_state(1);
  EXPECT_NEAR(statevector_expectation(rx, PauliSum::parse("Z0", 1), rho), std::cos(t), 1e-15);
  EXPECT_NEAR(statevector_expectation(rx, PauliSum::parse("Y0", 1), rho), -std::sin(t), 1e-15);
  EXPECT_NEAR(statevector_expectation(ry, PauliSum::parse("X0", 1), rho), std::sin(t), 1e-15);
}

TEST(StateVector, ProductStateFromBloch) {
  const ProductState rho({{0.0, 1.0, 0.0}, {0.6, 0.0, -0.8}});
  const auto sv = StateVector::product(rho);
  EXPECT_NEAR(sv.expectation(PauliString::parse("YI")), 1.0, 1e-15);
  EXPECT_NEAR(sv.expectation(PauliString::parse("IX")), 0.6, 1e-15);
  EXPECT_NEAR(sv.expectation(PauliString::parse("IZ")), -0.8, 1e-15);
  EXPECT_NEAR(sv.expectation(PauliString::parse("YX")), 0.6, 1e-15);
  EXPECT_THROW(StateVector::product(ProductState({{0.5, 0.0, 0.0}})), std::invalid_argument);
}

TEST(StateVector, NormPreservedByRandomCircuit) {
  const auto spec = haar_su4_ensemble(build_brickwork_1d(9, 6));
  auto sv = StateVector::product(ProductState::plus_state(9));
  const auto c = sample_circuit(spec, 3);
  for (const auto& layer : c.layers()) sv.apply(layer);
  EXPECT_NEAR(sv.norm(), 1.0, 1e-12);
}

TEST(Oracle, ReferencePtmOfRandomUnitaryIsOrthogonal) {
  Rng rng(4);
  for (int i = 0; i < 10; ++i) {
    EXPECT_LT(ptm_reference(sample_haar_su4(Support(0, 1), rng)).orthogonality_error(), 1e-12);
  }
}
