#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "pauliprop/ensemble.hpp"
#include "pauliprop/pauli_sum.hpp"
#include "pauliprop/propagation.hpp"

namespace pauliprop {

/// (2/3)^(k+1) * op_norm_sq
double mse_bound(std::size_t k, double op_norm_sq);

struct PauliCount {
  boost::multiprecision::cpp_int exact;  ///< sum_{l<=k} 3^l C(n,l)
  double bound = 1.0;                    ///< (3en/k)^k, 1 at k = 0
};

PauliCount pauli_count(std::size_t n, std::size_t k);

/// exact <= (3en/k)^k decided in integer arithmetic, with e replaced by a
/// rational lower bound so that `true` is a certificate.
bool pauli_count_within_bound(std::size_t n, std::size_t k);

/// Smallest M with M >= log(2/delta) / (2 eps^2).
std::size_t chernoff_samples(double eps, double delta);

/// Distribution over local output Paulis for one local input Pauli. The
/// probabilities are E_U T[in][out]^2.
struct TransferRow {
  std::array<std::uint8_t, 16> out{};
  std::array<double, 16> prob{};
  std::size_t size = 0;

  double total() const;
};

struct SlotTransfer {
  Support support;
  std::vector<TransferRow> rows;  ///< indexed by local Pauli index
};

/// Second-moment transfer of every gate slot of an ensemble, in circuit-time
/// layer order.
class SecondMomentTransfer {
 public:
  SecondMomentTransfer(std::size_t n_qubits, std::vector<std::vector<SlotTransfer>> layers);

  std::size_t n_qubits() const { return n_; }
  std::size_t depth() const { return layers_.size(); }
  const std::vector<SlotTransfer>& layer(std::size_t index) const { return layers_[index]; }
  /// Slot of layer `index` acting on qubit q, or -1.
  int slot_on(std::size_t index, std::size_t q) const { return slot_of_[index][q]; }
  /// max over rows of |sum of probabilities - 1|
  double max_row_error() const;

 private:
  std::size_t n_;
  std::vector<std::vector<SlotTransfer>> layers_;
  std::vector<std::vector<int>> slot_of_;
};

/// Closed forms: Haar SU(4) spreads a non-identity input uniformly over the 15
/// non-identity outputs, Haar SU(2) over X, Y, Z; a uniform-angle rotation keeps
/// a commuting input and otherwise splits 1/2 between the input and the branch
/// string P*G (its phase dropped, which no sampled quantity depends on);
/// Cliffords map deterministically. Correlated or fixed angles are rejected.
SecondMomentTransfer build_transfer(const EnsembleSpec& spec);

/// One sampled Pauli path. chain[0] is the terminal Pauli P_L and
/// chain.back() is P_0.
struct PathSample {
  std::vector<PauliString> chain;
  bool truncated = false;
  double x = 0.0;
};

struct MSEEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
  double bound = 0.0;
  /// mean > bound + 5 std_error
  bool exceeds_bound = false;
};

/// Draws one path and keeps every intermediate Pauli.
PathSample sample_path(const SecondMomentTransfer& t, const PauliSum& o, const ProductState& rho, std::size_t k,
                       Rng& rng);

/// Path-sampling estimate of E_U (f - f^(k))^2. Samples are split into fixed
/// chunks with their own derived seeds, so the result does not depend on the
/// thread count or on exec.
MSEEstimate mc_mse_estimate(const EnsembleSpec& spec, const PauliSum& o, const ProductState& rho, std::size_t k,
                            std::uint64_t samples, std::uint64_t seed, Execution exec = Execution::Parallel);

/// Same paths scored for several k at once (common random numbers).
std::vector<MSEEstimate> mc_mse_estimate(const EnsembleSpec& spec, const PauliSum& o, const ProductState& rho,
                                         const std::vector<std::size_t>& ks, std::uint64_t samples,
                                         std::uint64_t seed, Execution exec = Execution::Parallel);

/// Path-sampling estimate of E_U f^2, every path scored. Minus mu^2 this is
/// the trivial estimator's MSE.
MSEEstimate mc_second_moment(const EnsembleSpec& spec, const PauliSum& o, const ProductState& rho,
                             std::uint64_t samples, std::uint64_t seed, Execution exec = Execution::Parallel);

/// Exact sum over truncation-surviving paths of E Phi^2: a propagation of
/// squared weights through the transfer, truncated to weight k after every
/// layer but the first in circuit time. Equals E_U (f^(k))^2.
double truncated_second_moment(const SecondMomentTransfer& t, const PauliSum& o, const ProductState& rho,
                               std::size_t k);

/// Exact E_U (f - f^(k))^2 from the second-moment chain: untruncated minus
/// truncated second moment. Exponential in n; meant for small registers.
double exact_chain_mse(const SecondMomentTransfer& t, const PauliSum& o, const ProductState& rho, std::size_t k);

/// Oracle and propagation values on the same sampled circuits.
struct TrialData {
  std::vector<std::size_t> ks;
  std::vector<double> exact;                ///< f per trial
  std::vector<std::vector<double>> approx;  ///< approx[ki][trial] = f^(k)
  double mu = 0.0;                          ///< identity coefficient of O
  double propagation_ms = 0.0;
};

/// Circuit i uses circuit_seed(seed, i).
TrialData run_trials(const EnsembleSpec& spec, const PauliSum& o, const ProductState& rho,
                     const std::vector<std::size_t>& ks, std::size_t trials, std::uint64_t seed);

MSEEstimate empirical_mse(const TrialData& d, std::size_t k_index, double op_norm_sq);
MSEEstimate empirical_mse(const EnsembleSpec& spec, const PauliSum& o, const ProductState& rho, std::size_t k,
                          std::size_t trials, std::uint64_t seed);

struct TrivialStats {
  double mu = 0.0;
  double variance = 0.0;  ///< mean of (f - mu)^2, the trivial estimator's MSE
  double std_error = 0.0;
};

TrivialStats trivial_estimator_stats(const TrialData& d);
TrivialStats trivial_estimator_stats(const EnsembleSpec& spec, const PauliSum& o, const ProductState& rho,
                                     std::size_t trials, std::uint64_t seed);

/// Mean of (f^(k) - mu)^2 with its standard error.
TrivialStats truncated_variance(const TrialData& d, std::size_t k_index);

/// Paired test of MSE = Var f - Var f^(k). Per trial
/// g = (f - f^(k))^2 - (f - mu)^2 + (f^(k) - mu)^2 = 2 (f^(k) - f)(f^(k) - mu).
struct VarianceGap {
  double mse = 0.0;
  double var_exact = 0.0;
  double var_truncated = 0.0;
  double gap = 0.0;    ///< mean of g
  double sigma = 0.0;  ///< standard error of g
};

VarianceGap variance_gap(const TrialData& d, std::size_t k_index);

/// (1/5) (2/5)^L times the weight-1 mass of O.
double weight1_variance_brickwork(std::size_t depth, const PauliSum& o);

struct MarkovCheck {
  double fraction = 0.0;  ///< share of trials with |f - f^(k)| > eps
  double limit = 0.0;     ///< bound / eps^2 + 3 binomial standard errors
  bool pass = false;
};

MarkovCheck markov_check(const TrialData& d, std::size_t k_index, double eps, double bound);

}  // namespace pauliprop
