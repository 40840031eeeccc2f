#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <absl/container/flat_hash_map.h>

#include "pauliprop/pauli.hpp"

namespace pauliprop {

/// Coefficients below this magnitude are removed whenever terms are merged.
inline constexpr double kDropTolerance = 1e-14;

/// Sparse real expansion O = sum_P a_P P in the unnormalized Pauli basis.
class PauliSum {
 public:
  using Map = absl::flat_hash_map<PauliString, double, PauliStringHash>;
  using Term = std::pair<PauliString, double>;

  explicit PauliSum(std::size_t n_qubits);

  static PauliSum from_pauli(const PauliString& p, double coeff = 1.0);
  /// One "coeff literal" term per line; blank lines and '#' comments are
  /// skipped. A bare literal has coefficient 1.
  static PauliSum parse(std::string_view text, std::size_t n_qubits);
  static PauliSum read_file(const std::string& path, std::size_t n_qubits);

  std::size_t n_qubits() const { return n_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  /// Merges coeff into the term for p; the result is dropped if it falls below
  /// kDropTolerance.
  void add(const PauliString& p, double coeff);
  double coeff(const PauliString& p) const;
  void erase(const PauliString& p) { terms_.erase(p); }
  void clear() { terms_.clear(); }
  void reserve(std::size_t n) { terms_.reserve(n); }

  Map::const_iterator begin() const { return terms_.begin(); }
  Map::const_iterator end() const { return terms_.end(); }

  /// Terms in ascending mask order; the canonical order for every reduction.
  std::vector<Term> sorted_terms() const;

  /// Direct access for the propagation kernels.
  Map& raw() { return terms_; }
  const Map& raw() const { return terms_; }

  std::string to_string() const;

  friend bool operator==(const PauliSum& a, const PauliSum& b) { return a.n_ == b.n_ && a.terms_ == b.terms_; }

 private:
  std::size_t n_;
  Map terms_;
};

struct WeightBin {
  std::size_t term_count = 0;
  double l2_mass = 0.0;
  bool operator==(const WeightBin&) const = default;
};

PauliSum sum_truncate_weight(const PauliSum& s, std::size_t k);
PauliSum sum_truncate_coeff(const PauliSum& s, double eps);
/// sum of a_P^2, accumulated in canonical order.
double sum_l2_mass(const PauliSum& s);
std::map<std::size_t, WeightBin> sum_weight_histogram(const PauliSum& s);
/// Difference a - b, used to account for truncated mass.
PauliSum sum_subtract(const PauliSum& a, const PauliSum& b);

std::ostream& operator<<(std::ostream& os, const PauliSum& s);

}  // namespace pauliprop
