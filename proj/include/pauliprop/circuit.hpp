#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pauliprop/pauli.hpp"

namespace pauliprop {

using Qubit = std::uint32_t;
using Complex = std::complex<double>;

class InvalidCircuit : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Ordered 1- or 2-qubit support. For two qubits the first one is the most
/// significant site in the local basis (matrices and local Pauli indices).
class Support {
 public:
  Support() = default;
  explicit Support(Qubit q) : qubits_{q, 0}, size_(1) {}
  Support(Qubit a, Qubit b);

  std::size_t size() const { return size_; }
  Qubit operator[](std::size_t i) const { return qubits_[i]; }
  std::span<const Qubit> qubits() const { return {qubits_.data(), size_}; }
  /// 4^size
  std::size_t local_dim() const { return size_ == 1 ? 4 : 16; }
  bool overlaps(const Support& o) const;
  bool operator==(const Support&) const = default;

 private:
  std::array<Qubit, 2> qubits_{};
  std::size_t size_ = 0;
};

enum class CliffordKind { H, S, X, Y, Z, CNOT, CZ, SWAP };

std::string clifford_name(CliffordKind k);
CliffordKind clifford_from_name(std::string_view name);
std::size_t clifford_arity(CliffordKind k);

/// exp(-i angle G / 2) with G a non-identity Pauli on the gate support.
struct PauliRotation {
  /// Local generator, one letter per support qubit, e.g. "ZZ".
  std::string generator;
  double angle = 0.0;
  bool operator==(const PauliRotation&) const = default;
};

/// Dense row-major unitary on the local basis (2x2 or 4x4).
struct UnitaryMatrix {
  std::vector<Complex> m;
  bool operator==(const UnitaryMatrix&) const = default;
};

class Gate {
 public:
  using Kind = std::variant<CliffordKind, PauliRotation, UnitaryMatrix>;

  Gate(Support support, Kind kind);

  static Gate clifford(CliffordKind k, Support s) { return Gate(s, k); }
  static Gate rotation(std::string generator, double angle, Support s) {
    return Gate(s, PauliRotation{std::move(generator), angle});
  }
  static Gate unitary(std::vector<Complex> m, Support s) { return Gate(s, UnitaryMatrix{std::move(m)}); }

  const Support& support() const { return support_; }
  const Kind& kind() const { return kind_; }

  bool operator==(const Gate&) const = default;

 private:
  Support support_;
  Kind kind_;
};

/// Gates with pairwise-disjoint supports applied simultaneously.
class Layer {
 public:
  explicit Layer(std::vector<Gate> gates);
  const std::vector<Gate>& gates() const { return gates_; }
  bool operator==(const Layer&) const = default;

 private:
  std::vector<Gate> gates_;
};

/// U = U_L ... U_1; layers()[0] is U_1, the first layer in circuit time.
class Circuit {
 public:
  explicit Circuit(std::size_t n_qubits, std::vector<Layer> layers = {});

  std::size_t n_qubits() const { return n_; }
  std::size_t depth() const { return layers_.size(); }
  const std::vector<Layer>& layers() const { return layers_; }
  void append(Layer layer);

  /// Round-trippable text dump.
  std::string to_text() const;
  static Circuit from_text(std::string_view text);

  bool operator==(const Circuit&) const = default;

 private:
  std::size_t n_;
  std::vector<Layer> layers_;
};

/// Local Pauli index on a support: sum over sites of code * 4^(size-1-i).
std::size_t local_index(const PauliString& p, const Support& s);
/// Writes local index `idx` onto the support of p.
void set_local(PauliString& p, const Support& s, std::size_t idx);
/// Local index of a letter string such as "ZZ".
std::size_t local_index_of(std::string_view letters);

}  // namespace pauliprop
