#include <cmath>
#include <numbers>

#include <gtest/gtest.h>
#include <omp.h>

#include "pauliprop/ensemble.hpp"
#include "pauliprop/oracle.hpp"
#include "pauliprop/propagation.hpp"
#include "pauliprop/topology.hpp"

using namespace pauliprop;

namespace {

PauliSum heisenberg_image(const Gate& g, const std::string& dense) {
  return apply_gate_adjoint(PauliSum::from_pauli(PauliString::parse(dense)), g, gate_ptm(g));
}

double mass_identity_residual(const PauliSum& o, const PropagationResult& r) {
  double removed = r.stats.initial_mass_truncated;
  for (const auto& l : r.stats.layers) removed += l.mass_truncated;
  return std::abs(sum_l2_mass(o) - removed - sum_l2_mass(r.observable));
}

}  // namespace

TEST(PTM, RotationImageOfX) {
  // exp(-i t Z/2): U^dag X U = cos t X - sin t Y
  const double t = 0.7;
  const auto g = Gate::rotation("Z", t, Support(0));
  const auto img = heisenberg_image(g, "X");
  EXPECT_NEAR(img.coeff(PauliString::parse("X")), std::cos(t), 1e-15);
  EXPECT_NEAR(img.coeff(PauliString::parse("Y")), -std::sin(t), 1e-15);
  EXPECT_EQ(img.size(), 2U);
  EXPECT_LT(PTMatrix::max_difference(gate_ptm(g), ptm_reference(g)), 1e-14);
}

TEST(PTM, TwoQubitRotationImage) {
  // exp(-i t ZZ/2): XI -> cos t XI - sin t YZ
  const double t = 0.3;
  const auto img = heisenberg_image(Gate::rotation("ZZ", t, Support(0, 1)), "XI");
  EXPECT_NEAR(img.coeff(PauliString::parse("XI")), std::cos(t), 1e-15);
  EXPECT_NEAR(img.coeff(PauliString::parse("YZ")), -std::sin(t), 1e-15);
}

TEST(PTM, CliffordImages) {
  const auto cnot = Gate::clifford(CliffordKind::CNOT, Support(0, 1));
  EXPECT_EQ(heisenberg_image(cnot, "XI").coeff(PauliString::parse("XX")), 1.0);
  EXPECT_EQ(heisenberg_image(cnot, "IZ").coeff(PauliString::parse("ZZ")), 1.0);
  EXPECT_EQ(heisenberg_image(cnot, "IX").coeff(PauliString::parse("IX")), 1.0);
  const auto h = Gate::clifford(CliffordKind::H, Support(0));
  EXPECT_EQ(heisenberg_image(h, "Y").coeff(PauliString::parse("Y")), -1.0);
  const auto s = Gate::clifford(CliffordKind::S, Support(0));
  // S^dag X S = -Y
  EXPECT_EQ(heisenberg_image(s, "X").coeff(PauliString::parse("Y")), -1.0);
}

TEST(PTM, ClosedFormsMatchDenseReference) {
  for (auto k : {CliffordKind::H, CliffordKind::S, CliffordKind::X, CliffordKind::Y, CliffordKind::Z, CliffordKind::CNOT,
                 CliffordKind::CZ, CliffordKind::SWAP}) {
    const auto g = clifford_arity(k) == 1 ? Gate::clifford(k, Support(0)) : Gate::clifford(k, Support(1, 0));
    EXPECT_LT(PTMatrix::max_difference(gate_ptm(g), ptm_reference(g)), 1e-14) << clifford_name(k);
  }
  Rng rng(2);
  for (int i = 0; i < 20; ++i) {
    const auto g = sample_haar_su4(Support(0, 1), rng);
    const auto t = gate_ptm(g);
    EXPECT_LT(PTMatrix::max_difference(t, ptm_reference(g)), 1e-13);
    EXPECT_LT(t.orthogonality_error(), 1e-12);
    EXPECT_NEAR(t.at(0, 0), 1.0, 1e-14);
  }
}

TEST(ProductState, TracesAndValidation) {
  const auto zero = ProductState::zero_state(2);
  EXPECT_EQ(product_state_trace(PauliString::parse("ZZ"), zero), 1.0);
  EXPECT_EQ(product_state_trace(PauliString::parse("XI"), zero), 0.0);
  EXPECT_EQ(product_state_trace(PauliString::parse("XX"), ProductState::plus_state(2)), 1.0);
  ProductState tilted({{0.6, 0.0, 0.8}});
  EXPECT_NEAR(product_state_trace(PauliString::parse("X"), tilted), 0.6, 1e-15);
  EXPECT_TRUE(tilted.is_pure());
  EXPECT_FALSE(ProductState({{0.1, 0.0, 0.2}}).is_pure());
  EXPECT_THROW(ProductState({{1.0, 1.0, 0.0}}), std::invalid_argument);
}

TEST(BackPropagate, ExactWithoutTruncation) {
  const auto spec = haar_su4_ensemble(build_brickwork_1d(5, 4));
  const auto o = PauliSum::parse("0.5 Z2\n-0.3 X0*X1\n0.2 Y1*Z3*X4\n", 5);
  const auto rho = ProductState::zero_state(5);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto c = sample_circuit(spec, seed);
    EXPECT_NEAR(estimate_expectation(o, c, TruncationPolicy{}, rho), statevector_expectation(c, o, rho), 1e-12);
  }
}

TEST(BackPropagate, NoLayersReturnsObservableUntruncated) {
  const auto o = PauliSum::from_pauli(PauliString::parse("ZZZ"));
  TruncationPolicy p;
  p.weight_k = 1;
  EXPECT_EQ(back_propagate(o, Circuit(3), p).observable, o);
}

TEST(BackPropagate, InitialTruncationWithLayers) {
  const auto o = PauliSum::from_pauli(PauliString::parse("ZZI"));
  Circuit c(3, {Layer({Gate::clifford(CliffordKind::H, Support(2))})});
  TruncationPolicy p;
  p.weight_k = 1;
  const auto r = back_propagate(o, c, p);
  EXPECT_TRUE(r.observable.empty());
  EXPECT_EQ(r.stats.initial_mass_truncated, 1.0);
}

TEST(BackPropagate, FinalLayerIsNotTruncated) {
  const auto o = PauliSum::from_pauli(PauliString::parse("XII"));
  TruncationPolicy p;
  p.weight_k = 1;
  Circuit one(3, {Layer({Gate::clifford(CliffordKind::CNOT, Support(0, 1))})});
  EXPECT_EQ(back_propagate(o, one, p).observable.coeff(PauliString::parse("XXI")), 1.0);

  // The same image produced by layer 2 of 2 is cut.
  Circuit two(3, {Layer({Gate::clifford(CliffordKind::H, Support(2))}),
                  Layer({Gate::clifford(CliffordKind::CNOT, Support(0, 1))})});
  const auto r = back_propagate(o, two, p);
  EXPECT_TRUE(r.observable.empty());
  ASSERT_EQ(r.stats.layers.size(), 2U);
  EXPECT_EQ(r.stats.layers[0].layer, 2U);
  EXPECT_EQ(r.stats.layers[0].mass_truncated, 1.0);
}

TEST(BackPropagate, TruncatedMassTelescopes) {
  const auto spec = haar_su4_ensemble(build_staircase_2d(3, 3, 2));
  const auto o = PauliSum::parse("Z0\n0.5 X4\n-0.25 Z0*Z1\n", 9);
  for (std::size_t k : {1U, 2U, 3U}) {
    TruncationPolicy p;
    p.weight_k = k;
    const auto r = back_propagate(o, sample_circuit(spec, k), p);
    EXPECT_LT(mass_identity_residual(o, r), 1e-12) << "k=" << k;
    for (const auto& term : r.observable) EXPECT_LE(term.first.weight(), k + 1);
  }
}

TEST(BackPropagate, SerialAndParallelAreBitwiseEqual) {
  const auto spec = haar_su4_ensemble(build_brickwork_1d(10, 6));
  const auto o = PauliSum::parse("Z4\n0.5 X3*X5\n", 10);
  TruncationPolicy p;
  p.weight_k = 3;
  const auto c = sample_circuit(spec, 8);
  const auto serial = back_propagate(o, c, p, Execution::Serial);
  for (int threads : {1, 3}) {
    omp_set_num_threads(threads);
    const auto par = back_propagate(o, c, p, Execution::Parallel);
    EXPECT_EQ(par.observable, serial.observable);
    EXPECT_EQ(expectation(par.observable, ProductState::zero_state(10)),
              expectation(serial.observable, ProductState::zero_state(10)));
  }
  omp_set_num_threads(omp_get_num_procs());
}

TEST(BackPropagate, PerGateTruncationKeepsMassAccounting) {
  const auto spec = haar_su4_ensemble(build_brickwork_1d(8, 5));
  const auto o = PauliSum::from_pauli(PauliString::single(8, 3, Pauli::Z));
  TruncationPolicy layer;
  layer.weight_k = 2;
  TruncationPolicy gate = layer;
  gate.per_gate = true;
  const auto c = sample_circuit(spec, 1);
  const auto a = back_propagate(o, c, layer);
  const auto b = back_propagate(o, c, gate);
  EXPECT_LT(mass_identity_residual(o, a), 1e-12);
  EXPECT_LT(mass_identity_residual(o, b), 1e-12);
  EXPECT_LE(b.stats.peak_terms, a.stats.peak_terms);
}

TEST(BackPropagate, CoefficientThresholdDropsSmallTerms) {
  const auto spec = haar_su4_ensemble(build_brickwork_1d(6, 4));
  const auto o = PauliSum::from_pauli(PauliString::single(6, 2, Pauli::Z));
  TruncationPolicy p;
  p.coeff_eps = 0.05;
  const auto c = sample_circuit(spec, 2);
  const auto r = back_propagate(o, c, p);
  TruncationPolicy exact;
  EXPECT_LE(r.stats.peak_terms, back_propagate(o, c, exact).stats.peak_terms);
  EXPECT_LT(mass_identity_residual(o, r), 1e-12);
}

TEST(BackPropagate, BudgetIsAHardLimit) {
  const auto spec = haar_su4_ensemble(build_brickwork_1d(8, 6));
  TruncationPolicy p;
  p.max_terms = 50;
  try {
    back_propagate(PauliSum::from_pauli(PauliString::single(8, 3, Pauli::Z)), sample_circuit(spec, 0), p);
    FAIL() << "expected BudgetExceeded";
  } catch (const BudgetExceeded& e) {
    EXPECT_GE(e.layer(), 1U);
    EXPECT_LE(e.layer(), 6U);
  }
}

TEST(BackPropagate, RejectsMismatchedRegister) {
  Circuit c(3, {Layer({Gate::clifford(CliffordKind::H, Support(0))})});
  EXPECT_THROW(back_propagate(PauliSum::from_pauli(PauliString::parse("ZZ")), c, TruncationPolicy{}), SizeMismatch);
}

TEST(BackPropagate, RepeatedRunsAreDeterministic) {
  const auto spec = rotation_ensemble(build_staircase_2d(3, 3, 1), {"X", "Z"}, "ZZ", 2);
  const auto o = PauliSum::parse("Z0\nX8\n", 9);
  TruncationPolicy p;
  p.weight_k = 2;
  const auto c = sample_circuit(spec, 5);
  const double a = estimate_expectation(o, c, p, ProductState::plus_state(9));
  const double b = estimate_expectation(o, c, p, ProductState::plus_state(9));
  EXPECT_EQ(a, b);
}
