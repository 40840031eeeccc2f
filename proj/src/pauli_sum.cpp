#include "pauliprop/pauli_sum.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "pauliprop/numeric.hpp"

namespace pauliprop {

PauliSum::PauliSum(std::size_t n_qubits) : n_(n_qubits) {
  if (n_qubits == 0 || n_qubits > PauliString::kMaxQubits) {
    throw std::invalid_argument("PauliSum: unsupported qubit count " + std::to_string(n_qubits));
  }
}

PauliSum PauliSum::from_pauli(const PauliString& p, double coeff) {
  PauliSum s(p.n_qubits());
  s.add(p, coeff);
  return s;
}

void PauliSum::add(const PauliString& p, double coeff) {
  if (p.n_qubits() != n_) {
    throw SizeMismatch("adding a " + std::to_string(p.n_qubits()) + "-qubit Pauli to a " + std::to_string(n_) +
                       "-qubit sum");
  }
  auto [it, inserted] = terms_.try_emplace(p, coeff);
  if (!inserted) it->second += coeff;
  if (std::abs(it->second) < kDropTolerance) terms_.erase(it);
}

double PauliSum::coeff(const PauliString& p) const {
  const auto it = terms_.find(p);
  return it == terms_.end() ? 0.0 : it->second;
}

std::vector<PauliSum::Term> PauliSum::sorted_terms() const {
  std::vector<Term> out(terms_.begin(), terms_.end());
  std::sort(out.begin(), out.end(), [](const Term& a, const Term& b) { return a.first < b.first; });
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

PauliSum PauliSum::parse(std::string_view text, std::size_t n_qubits) {
  PauliSum out(n_qubits);
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    double coeff = 1.0;
    std::string_view literal = line;
    const auto space = line.find_first_of(" \t");
    if (space != std::string_view::npos) {
      const auto num = line.substr(0, space);
      const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), coeff);
      if (ec != std::errc{} || ptr != num.data() + num.size()) {
        throw ParseError("line " + std::to_string(line_no) + ": bad coefficient '" + std::string(num) + "'");
      }
      literal = trim(line.substr(space));
    }
    try {
      out.add(PauliString::parse(literal, n_qubits), coeff);
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

PauliSum PauliSum::read_file(const std::string& path, std::size_t n_qubits) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open observable file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), n_qubits);
}

std::string PauliSum::to_string() const {
  std::ostringstream os;
  os << *this;
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const PauliSum& s) {
  bool first = true;
  for (const auto& [p, c] : s.sorted_terms()) {
    if (!first) os << '\n';
    first = false;
    os << format_double(c) << ' ' << p.to_string();
  }
  return os;
}

PauliSum sum_truncate_weight(const PauliSum& s, std::size_t k) {
  PauliSum out(s.n_qubits());
  for (const auto& [p, c] : s) {
    if (p.weight() <= k) out.raw().emplace(p, c);
  }
  return out;
}

PauliSum sum_truncate_coeff(const PauliSum& s, double eps) {
  if (eps < 0) throw std::invalid_argument("coefficient threshold must be nonnegative");
  PauliSum out(s.n_qubits());
  for (const auto& [p, c] : s) {
    if (std::abs(c) >= eps) out.raw().emplace(p, c);
  }
  return out;
}

double sum_l2_mass(const PauliSum& s) {
  CompensatedSum acc;
  for (const auto& [p, c] : s.sorted_terms()) acc.add(c * c);
  return acc.value();
}

std::map<std::size_t, WeightBin> sum_weight_histogram(const PauliSum& s) {
  std::map<std::size_t, WeightBin> out;
  for (const auto& [p, c] : s.sorted_terms()) {
    auto& bin = out[p.weight()];
    ++bin.term_count;
    bin.l2_mass += c * c;
  }
  return out;
}

PauliSum sum_subtract(const PauliSum& a, const PauliSum& b) {
  if (a.n_qubits() != b.n_qubits()) throw SizeMismatch("subtracting sums of different sizes");
  PauliSum out = a;
  for (const auto& [p, c] : b.sorted_terms()) out.add(p, -c);
  return out;
}

}  // namespace pauliprop
