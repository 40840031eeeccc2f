#pragma once

#include <array>
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace pauliprop {

/// Raised when two objects that must share a qubit count do not.
class SizeMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Single-site Pauli code. The numeric value doubles as the local enumeration
/// order (I, X, Y, Z) used by transfer matrices.
enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

constexpr bool pauli_x_bit(Pauli p) { return p == Pauli::X || p == Pauli::Y; }
constexpr bool pauli_z_bit(Pauli p) { return p == Pauli::Y || p == Pauli::Z; }
constexpr Pauli pauli_from_bits(bool x, bool z) {
  return x ? (z ? Pauli::Y : Pauli::X) : (z ? Pauli::Z : Pauli::I);
}
char pauli_char(Pauli p);

/// A power of i: value = i^exponent.
class PauliPhase {
 public:
  constexpr PauliPhase() = default;
  constexpr explicit PauliPhase(int exponent) : exp_(static_cast<std::uint8_t>(((exponent % 4) + 4) % 4)) {}

  constexpr int exponent() const { return exp_; }
  constexpr bool is_real() const { return (exp_ & 1) == 0; }
  /// +1 or -1; only meaningful when is_real().
  constexpr int sign() const { return exp_ == 0 ? 1 : -1; }

  constexpr PauliPhase operator*(PauliPhase o) const { return PauliPhase(exp_ + o.exp_); }
  constexpr bool operator==(const PauliPhase&) const = default;

  std::string to_string() const;

 private:
  std::uint8_t exp_ = 0;
};

inline constexpr PauliPhase kPhaseOne{0};
inline constexpr PauliPhase kPhaseI{1};
inline constexpr PauliPhase kPhaseMinusOne{2};
inline constexpr PauliPhase kPhaseMinusI{3};

/// An n-qubit Hermitian Pauli string stored as X/Z bit masks. Qubit q lives in
/// bit q of the masks; up to kMaxQubits qubits.
class PauliString {
 public:
  static constexpr std::size_t kWords = 2;
  static constexpr std::size_t kMaxQubits = 64 * kWords;
  using Words = std::array<std::uint64_t, kWords>;

  PauliString() = default;
  /// Identity on n qubits.
  explicit PauliString(std::size_t n_qubits);

  /// Parses either the dense form ("XIZY", leftmost = qubit 0) or the sparse
  /// form ("Z0*X3", "I"). The sparse form needs n_qubits.
  static PauliString parse(std::string_view text, std::optional<std::size_t> n_qubits = std::nullopt);
  static PauliString single(std::size_t n_qubits, std::size_t qubit, Pauli p);

  std::size_t n_qubits() const { return n_; }
  Pauli at(std::size_t q) const {
    const auto w = q >> 6;
    const auto b = q & 63;
    return pauli_from_bits((x_[w] >> b) & 1U, (z_[w] >> b) & 1U);
  }
  void set(std::size_t q, Pauli p);

  const Words& x_words() const { return x_; }
  const Words& z_words() const { return z_; }

  Words support() const {
    Words s{};
    for (std::size_t w = 0; w < kWords; ++w) s[w] = x_[w] | z_[w];
    return s;
  }
  std::size_t weight() const {
    std::size_t c = 0;
    for (std::size_t w = 0; w < kWords; ++w) c += std::popcount(x_[w] | z_[w]);
    return c;
  }
  bool is_identity() const { return weight() == 0; }

  /// Dense text, leftmost character is qubit 0.
  std::string to_string() const;
  /// Sparse text such as "Z0*X3"; "I" for the identity.
  std::string to_sparse_string() const;

  friend bool operator==(const PauliString&, const PauliString&) = default;
  friend auto operator<=>(const PauliString&, const PauliString&) = default;

 private:
  Words x_{};
  Words z_{};
  std::uint16_t n_ = 0;

  friend std::pair<PauliString, PauliPhase> pauli_multiply(const PauliString&, const PauliString&);
  friend struct PauliStringHash;
};

struct PauliStringHash {
  std::size_t operator()(const PauliString& p) const noexcept;
};

std::size_t pauli_weight(const PauliString& p);
bool pauli_commutes(const PauliString& p, const PauliString& q);
/// P·Q = phase·R.
std::pair<PauliString, PauliPhase> pauli_multiply(const PauliString& p, const PauliString& q);

}  // namespace pauliprop
