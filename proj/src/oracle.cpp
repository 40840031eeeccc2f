#include "pauliprop/oracle.hpp"

#include <bit>
#include <cmath>
#include <string>

namespace pauliprop {

namespace {

void check_cap(std::size_t n) {
  if (n == 0) throw std::invalid_argument("StateVector: no qubits");
  if (n > kOracleMaxQubits) {
    throw OracleCapExceeded("statevector oracle supports at most " + std::to_string(kOracleMaxQubits) +
                            " qubits, got " + std::to_string(n));
  }
}

using Mat = std::vector<Complex>;

const Complex kI(0.0, 1.0);

Mat pauli_matrix(char c) {
  switch (c) {
    case 'I': return {1.0, 0.0, 0.0, 1.0};
    case 'X': return {0.0, 1.0, 1.0, 0.0};
    case 'Y': return {0.0, -kI, kI, 0.0};
    case 'Z': return {1.0, 0.0, 0.0, -1.0};
    default: throw std::invalid_argument(std::string("not a Pauli letter: ") + c);
  }
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(16);
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) out[r * 4 + c] = a[(r / 2) * 2 + c / 2] * b[(r % 2) * 2 + c % 2];
  }
  return out;
}

Mat multiply(const Mat& a, const Mat& b, std::size_t d) {
  Mat out(d * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      Complex acc = 0.0;
      for (std::size_t k = 0; k < d; ++k) acc += a[i * d + k] * b[k * d + j];
      out[i * d + j] = acc;
    }
  }
  return out;
}

Mat dagger(const Mat& a, std::size_t d) {
  Mat out(d * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) out[i * d + j] = std::conj(a[j * d + i]);
  }
  return out;
}

Mat clifford_matrix(CliffordKind k) {
  const double h = 1.0 / std::sqrt(2.0);
  switch (k) {
    case CliffordKind::H: return {h, h, h, -h};
    case CliffordKind::S: return {1.0, 0.0, 0.0, kI};
    case CliffordKind::X: return pauli_matrix('X');
    case CliffordKind::Y: return pauli_matrix('Y');
    case CliffordKind::Z: return pauli_matrix('Z');
    case CliffordKind::CNOT: return {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0};
    case CliffordKind::CZ: return {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, -1};
    case CliffordKind::SWAP: return {1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 1};
  }
  throw std::logic_error("unknown Clifford");
}

Mat letters_matrix(const std::string& letters) {
  if (letters.size() == 1) return pauli_matrix(letters[0]);
  return kron(pauli_matrix(letters[0]), pauli_matrix(letters[1]));
}

std::string index_letters(std::size_t idx, std::size_t m) {
  static constexpr char kLetters[] = "IXYZ";
  if (m == 1) return {kLetters[idx]};
  return {kLetters[idx / 4], kLetters[idx % 4]};
}

}  // namespace

std::vector<Complex> gate_matrix(const Gate& g) {
  if (const auto* c = std::get_if<CliffordKind>(&g.kind())) return clifford_matrix(*c);
  if (const auto* r = std::get_if<PauliRotation>(&g.kind())) {
    Mat m = letters_matrix(r->generator);
    const std::size_t d = r->generator.size() == 1 ? 2 : 4;
    const double c = std::cos(r->angle / 2);
    const double s = std::sin(r->angle / 2);
    for (std::size_t i = 0; i < d * d; ++i) m[i] *= -kI * s;
    for (std::size_t i = 0; i < d; ++i) m[i * d + i] += c;
    return m;
  }
  return std::get<UnitaryMatrix>(g.kind()).m;
}

StateVector::StateVector(std::size_t n_qubits) : n_(n_qubits) {
  check_cap(n_qubits);
  amps_.assign(std::size_t{1} << n_qubits, Complex(0.0));
  amps_[0] = 1.0;
}

StateVector StateVector::product(const ProductState& rho) {
  if (!rho.is_pure(1e-9)) throw std::invalid_argument("statevector oracle needs a pure product state");
  StateVector sv(rho.n_qubits());
  std::vector<std::array<Complex, 2>> sites;
  for (std::size_t q = 0; q < rho.n_qubits(); ++q) {
    const auto& b = rho.bloch(q);
    const double a0 = std::sqrt(std::max(0.0, (1.0 + b[2]) / 2.0));
    const Complex a1 = a0 > 1e-12 ? Complex(b[0], b[1]) / (2.0 * a0) : Complex(1.0);
    sites.push_back({a0, a1});
  }
  for (std::size_t i = 0; i < sv.amps_.size(); ++i) {
    Complex v = 1.0;
    for (std::size_t q = 0; q < sites.size(); ++q) v *= sites[q][(i >> q) & 1U];
    sv.amps_[i] = v;
  }
  return sv;
}

double StateVector::norm() const {
  double acc = 0.0;
  for (const auto& a : amps_) acc += std::norm(a);
  return std::sqrt(acc);
}

void StateVector::apply(const std::vector<Complex>& m, const Support& s) {
  for (Qubit q : s.qubits()) {
    if (q >= n_) throw SizeMismatch("gate qubit " + std::to_string(q) + " outside the register");
  }
  if (s.size() == 1) {
    if (m.size() != 4) throw std::invalid_argument("one-qubit gate needs a 2x2 matrix");
    const std::size_t stride = std::size_t{1} << s[0];
    for (std::size_t base = 0; base < amps_.size(); base += 2 * stride) {
      for (std::size_t i = base; i < base + stride; ++i) {
        const Complex a0 = amps_[i];
        const Complex a1 = amps_[i + stride];
        amps_[i] = m[0] * a0 + m[1] * a1;
        amps_[i + stride] = m[2] * a0 + m[3] * a1;
      }
    }
    return;
  }
  if (m.size() != 16) throw std::invalid_argument("two-qubit gate needs a 4x4 matrix");
  const std::size_t b0 = std::size_t{1} << s[0];
  const std::size_t b1 = std::size_t{1} << s[1];
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    if ((i & b0) != 0 || (i & b1) != 0) continue;
    const std::array<std::size_t, 4> idx = {i, i | b1, i | b0, i | b0 | b1};
    std::array<Complex, 4> in{};
    for (std::size_t r = 0; r < 4; ++r) in[r] = amps_[idx[r]];
    for (std::size_t r = 0; r < 4; ++r) {
      Complex acc = 0.0;
      for (std::size_t c = 0; c < 4; ++c) acc += m[r * 4 + c] * in[c];
      amps_[idx[r]] = acc;
    }
  }
}

void StateVector::apply(const Gate& g) { apply(gate_matrix(g), g.support()); }

void StateVector::apply(const Layer& layer) {
  for (const auto& g : layer.gates()) apply(g);
}

double StateVector::expectation(const PauliString& p) const {
  if (p.n_qubits() != n_) throw SizeMismatch("Pauli string and state sizes differ");
  const std::uint64_t x = p.x_words()[0];
  const std::uint64_t z = p.z_words()[0];
  static const Complex kPow[4] = {1.0, kI, -1.0, -kI};
  const Complex y_phase = kPow[std::popcount(x & z) % 4];
  Complex acc = 0.0;
  for (std::size_t b = 0; b < amps_.size(); ++b) {
    const double sign = (std::popcount(z & b) & 1) != 0 ? -1.0 : 1.0;
    acc += std::conj(amps_[b ^ x]) * amps_[b] * sign;
  }
  return (acc * y_phase).real();
}

double StateVector::expectation(const PauliSum& o) const {
  double acc = 0.0;
  for (const auto& [p, c] : o.sorted_terms()) acc += c * expectation(p);
  return acc;
}

double statevector_expectation(const Circuit& c, const PauliSum& o, const ProductState& rho) {
  check_cap(c.n_qubits());
  if (o.n_qubits() != c.n_qubits() || rho.n_qubits() != c.n_qubits()) {
    throw SizeMismatch("circuit, observable and state sizes differ");
  }
  StateVector sv = StateVector::product(rho);
  for (const auto& layer : c.layers()) sv.apply(layer);
  return sv.expectation(o);
}

PTMatrix ptm_reference(const Gate& g) {
  const std::size_t m = g.support().size();
  const std::size_t d = m == 1 ? 2 : 4;
  const Mat u = gate_matrix(g);
  const Mat u_dag = dagger(u, d);
  PTMatrix t(m);
  for (std::size_t q = 0; q < t.dim(); ++q) {
    const Mat conj = multiply(multiply(u_dag, letters_matrix(index_letters(q, m)), d), u, d);
    for (std::size_t p = 0; p < t.dim(); ++p) {
      const Mat prod = multiply(conj, letters_matrix(index_letters(p, m)), d);
      Complex tr = 0.0;
      for (std::size_t i = 0; i < d; ++i) tr += prod[i * d + i];
      t.at(q, p) = tr.real() / static_cast<double>(d);
    }
  }
  return t;
}

}  // namespace pauliprop
