#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "pauliprop/error_analysis.hpp"
#include "pauliprop/numeric.hpp"
#include "pauliprop/oracle.hpp"
#include "pauliprop/topology.hpp"

using namespace pauliprop;

namespace {

// Two Haar SU(4) gates on (0,1) then (1,2). For O = Z2 and |000> the path sums
// give E f^2 = 11/75 and E (f^(1))^2 = 8/75.
EnsembleSpec overlapping_pair() {
  EnsembleSpec spec;
  spec.name = "pair";
  spec.n_qubits = 3;
  spec.layers = {{GateSlot{Support(0, 1), SlotFamily::HaarSU4, "", CliffordKind::H}},
                 {GateSlot{Support(1, 2), SlotFamily::HaarSU4, "", CliffordKind::H}}};
  return spec;
}

double row_prob(const TransferRow& row, std::size_t out) {
  for (std::size_t i = 0; i < row.size; ++i)
    if (row.out[i] == out) return row.prob[i];
  return 0.0;
}

}  // namespace

TEST(MseBound, Values) {
  EXPECT_DOUBLE_EQ(mse_bound(0, 1.0), 2.0 / 3.0);
  EXPECT_NEAR(mse_bound(7, 1.0), 0.0390184423, 1e-10);
  EXPECT_DOUBLE_EQ(mse_bound(1, 2.25), 1.0);
}

TEST(PauliCount, SmallCases) {
  EXPECT_EQ(pauli_count(4, 1).exact, 13);
  EXPECT_EQ(pauli_count(3, 3).exact, 64);
  EXPECT_EQ(pauli_count(10, 2).exact, 436);
  EXPECT_EQ(pauli_count(5, 0).exact, 1);
  EXPECT_DOUBLE_EQ(pauli_count(5, 0).bound, 1.0);
  EXPECT_NEAR(pauli_count(10, 2).bound, std::pow(3 * std::numbers::e * 10 / 2, 2), 1e-9);
  EXPECT_THROW(pauli_count(0, 0), std::invalid_argument);
  EXPECT_THROW(pauli_count(3, 4), std::invalid_argument);
}

TEST(PauliCount, ExactBeyondDoublePrecision) {
  // sum_{l<=64} 3^l C(64,l) = 4^64
  boost::multiprecision::cpp_int four64 = 1;
  four64 <<= 128;
  EXPECT_EQ(pauli_count(64, 64).exact, four64);
  EXPECT_TRUE(pauli_count_within_bound(64, 8));
  EXPECT_TRUE(pauli_count_within_bound(1, 1));
}

TEST(Chernoff, SampleCount) {
  EXPECT_EQ(chernoff_samples(0.1, 0.05), 185U);
  EXPECT_THROW(chernoff_samples(0.0, 0.05), std::invalid_argument);
  EXPECT_THROW(chernoff_samples(0.1, 1.5), std::invalid_argument);
}

TEST(Transfer, HaarSu4RowsAreUniform) {
  const auto t = build_transfer(haar_su4_ensemble(build_brickwork_1d(4, 2)));
  EXPECT_LT(t.max_row_error(), 1e-12);
  const auto& slot = t.layer(0)[0];
  EXPECT_EQ(slot.rows[0].size, 1U);
  EXPECT_EQ(row_prob(slot.rows[0], 0), 1.0);
  for (std::size_t in = 1; in < 16; ++in) {
    EXPECT_EQ(slot.rows[in].size, 15U);
    EXPECT_EQ(row_prob(slot.rows[in], 0), 0.0);
    EXPECT_NEAR(row_prob(slot.rows[in], 5), 1.0 / 15.0, 1e-15);
  }
  EXPECT_EQ(t.slot_on(1, 0), -1);
  EXPECT_EQ(t.slot_on(1, 1), 0);
}

TEST(Transfer, HaarSu4RowsMatchSampledPtms) {
  Rng rng(21);
  const std::size_t in = local_index_of("ZI");
  std::array<MeanAccumulator, 16> acc;
  for (int s = 0; s < 20000; ++s) {
    const auto ptm = unitary_ptm(sample_haar_unitary(4, rng), 2);
    for (std::size_t out = 0; out < 16; ++out) acc[out].add(ptm.at(in, out) * ptm.at(in, out));
  }
  EXPECT_LT(acc[0].mean(), 1e-20);
  for (std::size_t out = 1; out < 16; ++out) {
    EXPECT_NEAR(acc[out].mean(), 1.0 / 15.0, 5 * acc[out].stderr_of_mean()) << out;
  }
}

TEST(Transfer, RotationRowsMatchSampledAngles) {
  const auto spec = rotation_ensemble(build_brickwork_1d(2, 1), {"Z"}, "ZZ", 1);
  const auto t = build_transfer(spec);
  EXPECT_LT(t.max_row_error(), 1e-12);
  const auto& rz = t.layer(0)[0].rows;
  EXPECT_EQ(row_prob(rz[3], 3), 1.0);
  EXPECT_EQ(row_prob(rz[1], 1), 0.5);
  EXPECT_EQ(row_prob(rz[1], 2), 0.5);
  const auto& zz = t.layer(1)[0].rows;
  EXPECT_EQ(row_prob(zz[local_index_of("XI")], local_index_of("YZ")), 0.5);
  EXPECT_EQ(row_prob(zz[local_index_of("XX")], local_index_of("XX")), 1.0);

  Rng rng(22);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  MeanAccumulator stay;
  MeanAccumulator branch;
  for (int s = 0; s < 20000; ++s) {
    const auto ptm = gate_ptm(Gate::rotation("ZZ", angle(rng), Support(0, 1)));
    const std::size_t in = local_index_of("XI");
    stay.add(ptm.at(in, in) * ptm.at(in, in));
    branch.add(ptm.at(in, local_index_of("YZ")) * ptm.at(in, local_index_of("YZ")));
  }
  EXPECT_NEAR(stay.mean(), 0.5, 5 * stay.stderr_of_mean());
  EXPECT_NEAR(branch.mean(), 0.5, 5 * branch.stderr_of_mean());
}

TEST(Transfer, CliffordAndSu2Slots) {
  EnsembleSpec spec;
  spec.n_qubits = 2;
  spec.layers = {{GateSlot{Support(0), SlotFamily::HaarSU2, "", CliffordKind::H},
                  GateSlot{Support(1), SlotFamily::Clifford, "", CliffordKind::H}},
                 {GateSlot{Support(0, 1), SlotFamily::Clifford, "", CliffordKind::CNOT}}};
  const auto t = build_transfer(spec);
  EXPECT_LT(t.max_row_error(), 1e-12);
  EXPECT_NEAR(row_prob(t.layer(0)[0].rows[1], 3), 1.0 / 3.0, 1e-15);
  EXPECT_EQ(row_prob(t.layer(0)[1].rows[1], 3), 1.0);
  EXPECT_EQ(row_prob(t.layer(1)[0].rows[local_index_of("XI")], local_index_of("XX")), 1.0);
}

TEST(Transfer, CorrelatedAnglesAreRejected) {
  const auto shared = rotation_ensemble(build_brickwork_1d(3, 1), {"X"}, "ZZ", 1, AngleCorrelation::SharedSingleAngle);
  EXPECT_THROW(build_transfer(shared), UnsupportedEnsemble);
  const auto fixed =
      rotation_ensemble(build_brickwork_1d(3, 1), {"X"}, "ZZ", 1, AngleCorrelation::FixedAngles, {0.2});
  EXPECT_THROW(build_transfer(fixed), UnsupportedEnsemble);
}

TEST(ExactChain, OverlappingPairClosedForm) {
  const auto t = build_transfer(overlapping_pair());
  const auto o = PauliSum::from_pauli(PauliString::single(3, 2, Pauli::Z));
  const auto rho = ProductState::zero_state(3);
  EXPECT_NEAR(truncated_second_moment(t, o, rho, 3), 11.0 / 75.0, 1e-15);
  EXPECT_NEAR(truncated_second_moment(t, o, rho, 1), 8.0 / 75.0, 1e-15);
  EXPECT_NEAR(exact_chain_mse(t, o, rho, 1), 0.04, 1e-15);
  EXPECT_NEAR(exact_chain_mse(t, o, rho, 2), 0.0, 1e-15);
}

TEST(ExactChain, SamplersAgreeWithClosedForm) {
  const auto spec = overlapping_pair();
  const auto o = PauliSum::from_pauli(PauliString::single(3, 2, Pauli::Z));
  const auto rho = ProductState::zero_state(3);
  const auto mc = mc_mse_estimate(spec, o, rho, 1, 100000, 5);
  EXPECT_NEAR(mc.mean, 0.04, 5 * mc.std_error);
  EXPECT_NEAR(mc.bound, 4.0 / 9.0, 1e-15);
  EXPECT_FALSE(mc.exceeds_bound);
  const auto second = mc_second_moment(spec, o, rho, 100000, 6);
  EXPECT_NEAR(second.mean, 11.0 / 75.0, 5 * second.std_error);
  const auto emp = empirical_mse(spec, o, rho, 1, 4000, 7);
  EXPECT_NEAR(emp.mean, 0.04, 5 * emp.std_error);
  const auto triv = trivial_estimator_stats(spec, o, rho, 4000, 8);
  EXPECT_NEAR(triv.variance, 11.0 / 75.0, 5 * triv.std_error);
}

TEST(PathSampler, IndependentOfExecution) {
  const auto spec = haar_su4_ensemble(build_brickwork_1d(6, 4));
  const auto o = PauliSum::from_pauli(PauliString::single(6, 2, Pauli::Z));
  const auto rho = ProductState::zero_state(6);
  const std::vector<std::size_t> ks = {0, 1, 2};
  const auto a = mc_mse_estimate(spec, o, rho, ks, 30000, 9, Execution::Serial);
  const auto b = mc_mse_estimate(spec, o, rho, ks, 30000, 9, Execution::Parallel);
  ASSERT_EQ(a.size(), 3U);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(a[i].mean, b[i].mean);
    EXPECT_EQ(a[i].std_error, b[i].std_error);
    EXPECT_EQ(a[i].samples, 30000U);
  }
  EXPECT_GE(a[0].mean, a[1].mean);
  EXPECT_GE(a[1].mean, a[2].mean);
  const auto single = mc_mse_estimate(spec, o, rho, 1, 30000, 9);
  EXPECT_EQ(single.mean, a[1].mean);
}

TEST(PathSampler, ChainEndsAtInitialPauli) {
  const auto spec = haar_su4_ensemble(build_brickwork_1d(4, 3));
  const auto t = build_transfer(spec);
  const auto o = PauliSum::from_pauli(PauliString::single(4, 1, Pauli::Z));
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const auto path = sample_path(t, o, ProductState::zero_state(4), 1, rng);
    ASSERT_EQ(path.chain.size(), 4U);
    EXPECT_EQ(path.chain.front(), PauliString::single(4, 1, Pauli::Z));
    bool over = false;
    for (std::size_t j = 0; j + 1 < path.chain.size(); ++j) over = over || path.chain[j].weight() > 1;
    EXPECT_EQ(path.truncated, over);
  }
}

TEST(Variance, GapIdentityIsAlgebraic) {
  TrialData d;
  d.ks = {1};
  d.mu = 0.1;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  d.approx.resize(1);
  for (int i = 0; i < 200; ++i) {
    d.exact.push_back(g(rng));
    d.approx[0].push_back(d.exact.back() + 0.3 * g(rng));
  }
  const auto v = variance_gap(d, 0);
  EXPECT_NEAR(v.gap, v.mse - (v.var_exact - v.var_truncated), 1e-12);
  const auto m = empirical_mse(d, 0, 1.0);
  EXPECT_NEAR(m.mean, v.mse, 1e-15);
  EXPECT_NEAR(trivial_estimator_stats(d).variance, v.var_exact, 1e-15);
  EXPECT_NEAR(truncated_variance(d, 0).variance, v.var_truncated, 1e-15);
}

TEST(Variance, Weight1BrickworkLawValues) {
  const auto z0 = PauliSum::from_pauli(PauliString::single(8, 0, Pauli::Z));
  EXPECT_NEAR(weight1_variance_brickwork(1, z0), 0.08, 1e-15);
  EXPECT_NEAR(weight1_variance_brickwork(3, z0), 0.0128, 1e-15);
  const auto two = PauliSum::parse("0.5 Z0\n2 X0*X1\n", 8);
  EXPECT_NEAR(weight1_variance_brickwork(1, two), 0.02, 1e-15);
}

TEST(Markov, FractionAndLimit) {
  TrialData d;
  d.ks = {1};
  d.exact = {0.0, 0.0, 0.0, 0.0};
  d.approx = {{0.0, 0.05, 0.2, 0.3}};
  const auto m = markov_check(d, 0, 0.1, 0.01);
  EXPECT_DOUBLE_EQ(m.fraction, 0.5);
  EXPECT_GE(m.limit, 1.0);
  EXPECT_TRUE(m.pass);
}

TEST(Trials, RejectOversizedAndMixedStates) {
  const auto spec = haar_su4_ensemble(build_brickwork_1d(15, 1));
  EXPECT_THROW(run_trials(spec, PauliSum::parse("Z0", 15), ProductState::zero_state(15), {1}, 2, 0),
               OracleCapExceeded);
  const auto small = haar_su4_ensemble(build_brickwork_1d(2, 1));
  EXPECT_THROW(run_trials(small, PauliSum::parse("Z0", 2), ProductState({{0.1, 0, 0}, {0, 0, 1}}), {1}, 2, 0),
               std::invalid_argument);
}
