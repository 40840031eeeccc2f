#include "pauliprop/pauli.hpp"

#include <cctype>
#include <charconv>

namespace pauliprop {

char pauli_char(Pauli p) { return "IXYZ"[static_cast<int>(p)]; }

std::string PauliPhase::to_string() const {
  static constexpr const char* kNames[] = {"+1", "+i", "-1", "-i"};
  return kNames[exp_];
}

PauliString::PauliString(std::size_t n_qubits) : n_(static_cast<std::uint16_t>(n_qubits)) {
  if (n_qubits == 0 || n_qubits > kMaxQubits) {
    throw std::invalid_argument("PauliString: qubit count must be in [1, " + std::to_string(kMaxQubits) + "], got " +
                                std::to_string(n_qubits));
  }
}

PauliString PauliString::single(std::size_t n_qubits, std::size_t qubit, Pauli p) {
  PauliString s(n_qubits);
  s.set(qubit, p);
  return s;
}

void PauliString::set(std::size_t q, Pauli p) {
  if (q >= n_) throw std::out_of_range("PauliString: qubit " + std::to_string(q) + " out of range");
  const auto w = q >> 6;
  const std::uint64_t bit = std::uint64_t{1} << (q & 63);
  x_[w] = pauli_x_bit(p) ? (x_[w] | bit) : (x_[w] & ~bit);
  z_[w] = pauli_z_bit(p) ? (z_[w] | bit) : (z_[w] & ~bit);
}

namespace {

std::optional<Pauli> letter_to_pauli(char c) {
  switch (std::toupper(static_cast<unsigned char>(c))) {
    case 'I':
    case '_':
      return Pauli::I;
    case 'X':
      return Pauli::X;
    case 'Y':
      return Pauli::Y;
    case 'Z':
      return Pauli::Z;
    default:
      return std::nullopt;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool looks_dense(std::string_view s) {
  for (char c : s) {
    if (!letter_to_pauli(c)) return false;
  }
  return !s.empty();
}

}  // namespace

PauliString PauliString::parse(std::string_view text, std::optional<std::size_t> n_qubits) {
  text = trim(text);
  if (text.empty()) throw ParseError("empty Pauli literal");

  // A lone "I" is the identity in either form; it takes the size from n_qubits.
  if ((text == "I" || text == "i") && n_qubits && *n_qubits != 1) return PauliString(*n_qubits);

  if (looks_dense(text)) {
    if (n_qubits && *n_qubits != text.size()) {
      throw ParseError("dense Pauli literal '" + std::string(text) + "' has " + std::to_string(text.size()) +
                       " sites, expected " + std::to_string(*n_qubits));
    }
    PauliString s(text.size());
    for (std::size_t q = 0; q < text.size(); ++q) s.set(q, *letter_to_pauli(text[q]));
    return s;
  }

  if (!n_qubits) throw ParseError("sparse Pauli literal '" + std::string(text) + "' needs a qubit count");
  PauliString s(*n_qubits);
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto star = rest.find('*');
    std::string_view factor = trim(rest.substr(0, star));
    rest = star == std::string_view::npos ? std::string_view{} : rest.substr(star + 1);
    if (factor.size() < 2) throw ParseError("bad Pauli factor '" + std::string(factor) + "' in '" + std::string(text) + "'");
    const auto p = letter_to_pauli(factor.front());
    std::size_t q = 0;
    const auto digits = factor.substr(1);
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), q);
    if (!p || ec != std::errc{} || ptr != digits.data() + digits.size()) {
      throw ParseError("bad Pauli factor '" + std::string(factor) + "' in '" + std::string(text) + "'");
    }
    if (q >= *n_qubits) {
      throw ParseError("qubit index " + std::to_string(q) + " out of range in '" + std::string(text) + "'");
    }
    if (s.at(q) != Pauli::I) throw ParseError("qubit " + std::to_string(q) + " repeated in '" + std::string(text) + "'");
    s.set(q, *p);
  }
  return s;
}

std::string PauliString::to_string() const {
  std::string out(n_, 'I');
  for (std::size_t q = 0; q < n_; ++q) out[q] = pauli_char(at(q));
  return out;
}

std::string PauliString::to_sparse_string() const {
  std::string out;
  for (std::size_t q = 0; q < n_; ++q) {
    const Pauli p = at(q);
    if (p == Pauli::I) continue;
    if (!out.empty()) out += '*';
    out += pauli_char(p);
    out += std::to_string(q);
  }
  return out.empty() ? "I" : out;
}

std::size_t PauliStringHash::operator()(const PauliString& p) const noexcept {
  // murmur3 fmix64 over a word-wise combination
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ p.n_;
  for (std::size_t w = 0; w < PauliString::kWords; ++w) {
    h ^= p.x_[w] + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= (p.z_[w] * 0xff51afd7ed558ccdULL) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  h *= 0xc4ceb9fe1a85ec53ULL;
  h ^= h >> 33;
  return static_cast<std::size_t>(h);
}

std::size_t pauli_weight(const PauliString& p) { return p.weight(); }

namespace {
void require_same_size(const PauliString& p, const PauliString& q) {
  if (p.n_qubits() != q.n_qubits()) {
    throw SizeMismatch("Pauli strings on " + std::to_string(p.n_qubits()) + " and " + std::to_string(q.n_qubits()) +
                       " qubits");
  }
}
}  // namespace

bool pauli_commutes(const PauliString& p, const PauliString& q) {
  require_same_size(p, q);
  std::size_t anti = 0;
  for (std::size_t w = 0; w < PauliString::kWords; ++w) {
    anti += std::popcount(p.x_words()[w] & q.z_words()[w]) + std::popcount(p.z_words()[w] & q.x_words()[w]);
  }
  return (anti & 1U) == 0;
}

std::pair<PauliString, PauliPhase> pauli_multiply(const PauliString& p, const PauliString& q) {
  require_same_size(p, q);
  // Per site P = i^{xz} X^x Z^z, and Z^z1 X^x2 = (-1)^{z1 x2} X^x2 Z^z1.
  PauliString r(p.n_qubits());
  int e = 0;
  for (std::size_t w = 0; w < PauliString::kWords; ++w) {
    r.x_[w] = p.x_[w] ^ q.x_[w];
    r.z_[w] = p.z_[w] ^ q.z_[w];
    e += std::popcount(p.x_[w] & p.z_[w]) + std::popcount(q.x_[w] & q.z_[w]) - std::popcount(r.x_[w] & r.z_[w]) +
         2 * std::popcount(p.z_[w] & q.x_[w]);
  }
  return {r, PauliPhase(e)};
}

}  // namespace pauliprop
