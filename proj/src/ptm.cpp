#include <algorithm>
#include <cmath>
#include <string_view>

#include "pauliprop/propagation.hpp"

namespace pauliprop {

PTMatrix::PTMatrix(std::size_t support_size)
    : m_(support_size), dim_(support_size == 1 ? 4 : 16), t_(dim_ * dim_, 0.0) {
  if (support_size != 1 && support_size != 2) throw std::invalid_argument("PTMatrix: support must be 1 or 2 qubits");
}

PTMatrix PTMatrix::identity(std::size_t support_size) {
  PTMatrix t(support_size);
  for (std::size_t i = 0; i < t.dim(); ++i) t.at(i, i) = 1.0;
  return t;
}

double PTMatrix::orthogonality_error() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = 0; j < dim_; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < dim_; ++k) acc += at(i, k) * at(j, k);
      worst = std::max(worst, std::abs(acc - (i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

double PTMatrix::max_difference(const PTMatrix& a, const PTMatrix& b) {
  if (a.dim_ != b.dim_) throw SizeMismatch("PTMatrix sizes differ");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.t_.size(); ++i) worst = std::max(worst, std::abs(a.t_[i] - b.t_[i]));
  return worst;
}

namespace {

// Local Pauli matrices in the order I, X, Y, Z.
const std::array<std::array<Complex, 4>, 4>& single_site_paulis() {
  static const std::array<std::array<Complex, 4>, 4> kPaulis = {{
      {1.0, 0.0, 0.0, 1.0},
      {0.0, 1.0, 1.0, 0.0},
      {0.0, Complex(0, -1), Complex(0, 1), 0.0},
      {1.0, 0.0, 0.0, -1.0},
  }};
  return kPaulis;
}

std::vector<Complex> local_pauli_matrix(std::size_t idx, std::size_t m) {
  const auto& s = single_site_paulis();
  if (m == 1) return {s[idx].begin(), s[idx].end()};
  const auto& a = s[idx >> 2];
  const auto& b = s[idx & 3U];
  std::vector<Complex> out(16);
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) out[r * 4 + c] = a[(r >> 1) * 2 + (c >> 1)] * b[(r & 1U) * 2 + (c & 1U)];
  }
  return out;
}

std::vector<Complex> matmul(const std::vector<Complex>& a, const std::vector<Complex>& b, std::size_t d) {
  std::vector<Complex> out(d * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      const Complex aik = a[i * d + k];
      if (aik == Complex(0.0)) continue;
      for (std::size_t j = 0; j < d; ++j) out[i * d + j] += aik * b[k * d + j];
    }
  }
  return out;
}

std::vector<Complex> adjoint(const std::vector<Complex>& a, std::size_t d) {
  std::vector<Complex> out(d * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) out[j * d + i] = std::conj(a[i * d + j]);
  }
  return out;
}

struct SignedPauli {
  PauliString p;
  PauliPhase phase;
};

SignedPauli parse_signed(std::string_view s) {
  const PauliPhase phase = s.front() == '-' ? kPhaseMinusOne : kPhaseOne;
  return {PauliString::parse(s.substr(1)), phase};
}

// Images U^dag X_s U and U^dag Z_s U for each local site s.
std::array<std::string_view, 4> clifford_images(CliffordKind k) {
  switch (k) {
    case CliffordKind::H: return {"+Z", "+X", "", ""};
    case CliffordKind::S: return {"-Y", "+Z", "", ""};
    case CliffordKind::X: return {"+X", "-Z", "", ""};
    case CliffordKind::Y: return {"-X", "-Z", "", ""};
    case CliffordKind::Z: return {"-X", "+Z", "", ""};
    case CliffordKind::CNOT: return {"+XX", "+ZI", "+IX", "+ZZ"};
    case CliffordKind::CZ: return {"+XZ", "+ZI", "+ZX", "+IZ"};
    case CliffordKind::SWAP: return {"+IX", "+IZ", "+XI", "+ZI"};
  }
  return {};
}

PTMatrix clifford_ptm(CliffordKind k) {
  const std::size_t m = clifford_arity(k);
  const auto images = clifford_images(k);
  PTMatrix t(m);
  for (std::size_t q = 0; q < t.dim(); ++q) {
    SignedPauli acc{PauliString(m), kPhaseOne};
    for (std::size_t site = 0; site < m; ++site) {
      const auto code = static_cast<Pauli>((q >> (2 * (m - 1 - site))) & 3U);
      const bool x = pauli_x_bit(code);
      const bool z = pauli_z_bit(code);
      for (const auto& [present, image] : {std::pair{x, images[2 * site]}, std::pair{z, images[2 * site + 1]}}) {
        if (!present) continue;
        const SignedPauli g = parse_signed(image);
        auto [prod, phase] = pauli_multiply(acc.p, g.p);
        acc = {prod, acc.phase * g.phase * phase};
      }
      if (x && z) acc.phase = acc.phase * kPhaseI;
    }
    if (!acc.phase.is_real()) throw std::logic_error("Clifford image with imaginary phase");
    t.at(q, local_index(acc.p, m == 1 ? Support(0) : Support(0, 1))) = acc.phase.sign();
  }
  return t;
}

// U^dag Q U = cos(theta) Q - i sin(theta) Q G for Q anticommuting with G.
PTMatrix rotation_ptm(const PauliRotation& r) {
  const std::size_t m = r.generator.size();
  const Support local = m == 1 ? Support(0) : Support(0, 1);
  PauliString g(m);
  set_local(g, local, local_index_of(r.generator));
  const double c = std::cos(r.angle);
  const double s = std::sin(r.angle);
  PTMatrix t(m);
  for (std::size_t q = 0; q < t.dim(); ++q) {
    PauliString qs(m);
    set_local(qs, local, q);
    if (pauli_commutes(qs, g)) {
      t.at(q, q) = 1.0;
      continue;
    }
    const auto [prod, phase] = pauli_multiply(qs, g);
    const PauliPhase total = kPhaseMinusI * phase;
    t.at(q, q) = c;
    t.at(q, local_index(prod, local)) = s * total.sign();
  }
  return t;
}

}  // namespace

PTMatrix unitary_ptm(const std::vector<Complex>& u, std::size_t support_size) {
  const std::size_t d = support_size == 1 ? 2 : 4;
  if (u.size() != d * d) throw std::invalid_argument("unitary_ptm: matrix size does not match the support");
  PTMatrix t(support_size);
  const auto u_dag = adjoint(u, d);
  std::vector<std::vector<Complex>> paulis;
  for (std::size_t i = 0; i < t.dim(); ++i) paulis.push_back(local_pauli_matrix(i, support_size));
  for (std::size_t q = 0; q < t.dim(); ++q) {
    const auto conj = matmul(matmul(u_dag, paulis[q], d), u, d);
    for (std::size_t p = 0; p < t.dim(); ++p) {
      Complex tr = 0.0;
      for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = 0; b < d; ++b) tr += conj[a * d + b] * paulis[p][b * d + a];
      }
      t.at(q, p) = tr.real() / static_cast<double>(d);
    }
  }
  return t;
}

PTMatrix gate_ptm(const Gate& g) {
  if (const auto* c = std::get_if<CliffordKind>(&g.kind())) return clifford_ptm(*c);
  if (const auto* r = std::get_if<PauliRotation>(&g.kind())) return rotation_ptm(*r);
  return unitary_ptm(std::get<UnitaryMatrix>(g.kind()).m, g.support().size());
}

}  // namespace pauliprop
