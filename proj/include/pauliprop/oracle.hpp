#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "pauliprop/circuit.hpp"
#include "pauliprop/pauli_sum.hpp"
#include "pauliprop/propagation.hpp"

namespace pauliprop {

/// Largest register the dense simulator accepts (16384 amplitudes).
inline constexpr std::size_t kOracleMaxQubits = 14;

class OracleCapExceeded : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dense state; qubit q is bit q of the amplitude index.
class StateVector {
 public:
  explicit StateVector(std::size_t n_qubits);
  /// Pure product state; throws if any Bloch vector is not unit length.
  static StateVector product(const ProductState& rho);

  std::size_t n_qubits() const { return n_; }
  const std::vector<Complex>& amplitudes() const { return amps_; }
  double norm() const;

  /// Applies a 2x2 (one qubit) or 4x4 (two qubits, basis 2*b(s[0]) + b(s[1]))
  /// row-major matrix.
  void apply(const std::vector<Complex>& m, const Support& s);
  void apply(const Gate& g);
  void apply(const Layer& layer);

  double expectation(const PauliString& p) const;
  double expectation(const PauliSum& o) const;

 private:
  std::size_t n_;
  std::vector<Complex> amps_;
};

/// Dense matrix of a gate built from its definition: tabulated Clifford
/// matrices, cos(t/2) I - i sin(t/2) G for rotations.
std::vector<Complex> gate_matrix(const Gate& g);

/// Tr[U rho U^dag O] by forward simulation.
double statevector_expectation(const Circuit& c, const PauliSum& o, const ProductState& rho);

/// PTM entries (1/2^m) Tr[U^dag Q U P] by dense algebra on gate_matrix(g).
PTMatrix ptm_reference(const Gate& g);

}  // namespace pauliprop
