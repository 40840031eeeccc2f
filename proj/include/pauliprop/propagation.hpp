#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "pauliprop/circuit.hpp"
#include "pauliprop/pauli_sum.hpp"

namespace pauliprop {

/// Pauli transfer matrix of a 1- or 2-qubit gate over the local Pauli basis
/// (I,X,Y,Z per site, first support qubit most significant):
/// at(q, p) = Tr[U^dag Q U P] / 2^m, so U^dag Q U = sum_P at(q, p) P.
class PTMatrix {
 public:
  PTMatrix() = default;
  explicit PTMatrix(std::size_t support_size);

  std::size_t support_size() const { return m_; }
  std::size_t dim() const { return dim_; }
  double at(std::size_t row, std::size_t col) const { return t_[row * dim_ + col]; }
  double& at(std::size_t row, std::size_t col) { return t_[row * dim_ + col]; }

  static PTMatrix identity(std::size_t support_size);
  /// max |T T^T - I|
  double orthogonality_error() const;
  /// max entrywise |a - b|
  static double max_difference(const PTMatrix& a, const PTMatrix& b);

 private:
  std::size_t m_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> t_;
};

/// Closed forms for Cliffords and Pauli rotations; entrywise traces for
/// dense unitaries.
PTMatrix gate_ptm(const Gate& g);
/// Entrywise Tr[U^dag Q U P] / d from a dense local unitary.
PTMatrix unitary_ptm(const std::vector<Complex>& u, std::size_t support_size);

struct TruncationPolicy {
  static constexpr std::size_t kNoLimit = std::numeric_limits<std::size_t>::max();

  std::size_t weight_k = kNoLimit;
  double coeff_eps = 0.0;      ///< 0 disables
  std::size_t max_terms = 0;   ///< 0 disables
  bool per_gate = false;       ///< truncate after every gate instead of every layer
};

enum class Execution { Serial, Parallel };

/// Product state described by per-qubit Bloch vectors.
class ProductState {
 public:
  using Bloch = std::array<double, 3>;

  explicit ProductState(std::vector<Bloch> bloch);
  static ProductState zero_state(std::size_t n);
  static ProductState plus_state(std::size_t n);

  std::size_t n_qubits() const { return bloch_.size(); }
  const Bloch& bloch(std::size_t q) const { return bloch_[q]; }
  bool is_pure(double tol = 1e-9) const;

 private:
  std::vector<Bloch> bloch_;
};

struct LayerStats {
  std::size_t layer = 0;  ///< circuit index j of the layer, 1-based
  std::size_t terms_before = 0;
  std::size_t terms_after = 0;
  double mass_truncated = 0.0;
  double millis = 0.0;
};

struct PropagationStats {
  /// In processing order: layer L first.
  std::vector<LayerStats> layers;
  /// Mass removed by the initial truncation of O.
  double initial_mass_truncated = 0.0;
  std::size_t peak_terms = 0;
  double wall_ms = 0.0;
};

struct PropagationResult {
  PauliSum observable;
  PropagationStats stats;
};

class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(std::size_t layer, std::size_t terms, std::size_t budget);
  std::size_t layer() const { return layer_; }

 private:
  std::size_t layer_;
};

/// Serial reference: U^dag S U term by term into a fresh sum. Untouched terms
/// are carried over first, then touched terms are expanded in ascending mask
/// order; the in-place kernel reproduces this accumulation order exactly.
PauliSum apply_gate_adjoint(const PauliSum& s, const Gate& g, const PTMatrix& ptm);

/// Low-weight Heisenberg propagation: truncate O to weight k, conjugate by
/// layers L..2 truncating after each, then conjugate by layer 1 untruncated.
/// With no layers the observable is returned as is.
PropagationResult back_propagate(const PauliSum& o, const Circuit& c, const TruncationPolicy& policy,
                                 Execution exec = Execution::Parallel);

double product_state_trace(const PauliString& p, const ProductState& rho);
/// sum_P a_P Tr[P rho]; order-independent.
double expectation(const PauliSum& o, const ProductState& rho);
double estimate_expectation(const PauliSum& o, const Circuit& c, const TruncationPolicy& policy,
                            const ProductState& rho, Execution exec = Execution::Parallel);

}  // namespace pauliprop
