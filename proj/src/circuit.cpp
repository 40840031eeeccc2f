#include "pauliprop/circuit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>
#include <sstream>

#include "pauliprop/numeric.hpp"

namespace pauliprop {

Support::Support(Qubit a, Qubit b) : qubits_{a, b}, size_(2) {
  if (a == b) throw InvalidCircuit("two-qubit gate on repeated qubit " + std::to_string(a));
}

bool Support::overlaps(const Support& o) const {
  for (Qubit a : qubits()) {
    for (Qubit b : o.qubits()) {
      if (a == b) return true;
    }
  }
  return false;
}

std::string clifford_name(CliffordKind k) {
  switch (k) {
    case CliffordKind::H: return "H";
    case CliffordKind::S: return "S";
    case CliffordKind::X: return "X";
    case CliffordKind::Y: return "Y";
    case CliffordKind::Z: return "Z";
    case CliffordKind::CNOT: return "CNOT";
    case CliffordKind::CZ: return "CZ";
    case CliffordKind::SWAP: return "SWAP";
  }
  return "?";
}

CliffordKind clifford_from_name(std::string_view name) {
  static constexpr CliffordKind kAll[] = {CliffordKind::H,    CliffordKind::S,  CliffordKind::X,
                                          CliffordKind::Y,    CliffordKind::Z,  CliffordKind::CNOT,
                                          CliffordKind::CZ,   CliffordKind::SWAP};
  for (CliffordKind k : kAll) {
    if (clifford_name(k) == name) return k;
  }
  throw ParseError("unknown Clifford gate '" + std::string(name) + "'");
}

std::size_t clifford_arity(CliffordKind k) {
  switch (k) {
    case CliffordKind::CNOT:
    case CliffordKind::CZ:
    case CliffordKind::SWAP:
      return 2;
    default:
      return 1;
  }
}

std::size_t local_index_of(std::string_view letters) {
  std::size_t idx = 0;
  for (char c : letters) {
    int code = 0;
    switch (c) {
      case 'I': code = 0; break;
      case 'X': code = 1; break;
      case 'Y': code = 2; break;
      case 'Z': code = 3; break;
      default: throw ParseError("bad Pauli letter '" + std::string(1, c) + "'");
    }
    idx = idx * 4 + static_cast<std::size_t>(code);
  }
  return idx;
}

std::size_t local_index(const PauliString& p, const Support& s) {
  std::size_t idx = 0;
  for (Qubit q : s.qubits()) idx = idx * 4 + static_cast<std::size_t>(p.at(q));
  return idx;
}

void set_local(PauliString& p, const Support& s, std::size_t idx) {
  for (std::size_t i = s.size(); i-- > 0;) {
    p.set(s[i], static_cast<Pauli>(idx & 3U));
    idx >>= 2;
  }
}

Gate::Gate(Support support, Kind kind) : support_(support), kind_(std::move(kind)) {
  if (support_.size() == 0) throw InvalidCircuit("gate without support");
  if (const auto* c = std::get_if<CliffordKind>(&kind_)) {
    if (clifford_arity(*c) != support_.size()) {
      throw InvalidCircuit("Clifford " + clifford_name(*c) + " needs " + std::to_string(clifford_arity(*c)) + " qubits");
    }
  } else if (const auto* r = std::get_if<PauliRotation>(&kind_)) {
    if (r->generator.size() != support_.size()) throw InvalidCircuit("rotation generator does not fit its support");
    if (local_index_of(r->generator) == 0) throw InvalidCircuit("rotation generator is the identity");
    if (!std::isfinite(r->angle)) throw InvalidCircuit("rotation angle is not finite");
  } else {
    const auto& u = std::get<UnitaryMatrix>(kind_).m;
    const std::size_t d = support_.size() == 1 ? 2 : 4;
    if (u.size() != d * d) throw InvalidCircuit("unitary matrix has wrong size");
    double worst = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        Complex acc = 0.0;
        for (std::size_t r = 0; r < d; ++r) acc += std::conj(u[r * d + i]) * u[r * d + j];
        worst = std::max(worst, std::abs(acc - Complex(i == j ? 1.0 : 0.0)));
      }
    }
    if (worst > 1e-10) throw InvalidCircuit("matrix is not unitary (deviation " + format_double(worst) + ")");
  }
}

Layer::Layer(std::vector<Gate> gates) : gates_(std::move(gates)) {
  if (gates_.empty()) throw InvalidCircuit("empty layer");
  for (std::size_t i = 0; i < gates_.size(); ++i) {
    for (std::size_t j = i + 1; j < gates_.size(); ++j) {
      if (gates_[i].support().overlaps(gates_[j].support())) {
        throw InvalidCircuit("layer gates " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
      }
    }
  }
}

Circuit::Circuit(std::size_t n_qubits, std::vector<Layer> layers) : n_(n_qubits) {
  if (n_qubits == 0 || n_qubits > PauliString::kMaxQubits) {
    throw InvalidCircuit("unsupported qubit count " + std::to_string(n_qubits));
  }
  for (auto& l : layers) append(std::move(l));
}

void Circuit::append(Layer layer) {
  for (const auto& g : layer.gates()) {
    for (Qubit q : g.support().qubits()) {
      if (q >= n_) throw InvalidCircuit("gate on qubit " + std::to_string(q) + " in a " + std::to_string(n_) + "-qubit circuit");
    }
  }
  layers_.push_back(std::move(layer));
}

std::string Circuit::to_text() const {
  std::ostringstream os;
  os << "circuit " << n_ << '\n';
  for (const auto& layer : layers_) {
    os << "layer\n";
    for (const auto& g : layer.gates()) {
      std::ostringstream qs;
      for (Qubit q : g.support().qubits()) qs << ' ' << q;
      if (const auto* c = std::get_if<CliffordKind>(&g.kind())) {
        os << "clifford " << clifford_name(*c) << qs.str() << '\n';
      } else if (const auto* r = std::get_if<PauliRotation>(&g.kind())) {
        os << "rotation " << r->generator << qs.str() << ' ' << format_double(r->angle) << '\n';
      } else {
        os << "unitary" << qs.str();
        for (const Complex& z : std::get<UnitaryMatrix>(g.kind()).m) {
          os << ' ' << format_double(z.real()) << ' ' << format_double(z.imag());
        }
        os << '\n';
      }
    }
    os << "end\n";
  }
  return os.str();
}

namespace {

double parse_number(const std::string& tok, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw ParseError("circuit line " + std::to_string(line) + ": bad number '" + tok + "'");
  }
  return v;
}

Support read_support(std::istringstream& is, std::size_t arity, std::size_t line) {
  Qubit a = 0;
  Qubit b = 0;
  if (!(is >> a) || (arity == 2 && !(is >> b))) {
    throw ParseError("circuit line " + std::to_string(line) + ": missing qubit index");
  }
  return arity == 1 ? Support(a) : Support(a, b);
}

}  // namespace

Circuit Circuit::from_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line = 0;
  std::optional<Circuit> circuit;
  std::vector<Gate> pending;
  bool in_layer = false;
  while (std::getline(in, raw)) {
    ++line;
    std::istringstream is(raw);
    std::string head;
    if (!(is >> head) || head.front() == '#') continue;
    if (head == "circuit") {
      std::size_t n = 0;
      if (!(is >> n)) throw ParseError("circuit line " + std::to_string(line) + ": missing qubit count");
      circuit.emplace(n);
    } else if (!circuit) {
      throw ParseError("circuit line " + std::to_string(line) + ": expected 'circuit <n>' header");
    } else if (head == "layer") {
      in_layer = true;
      pending.clear();
    } else if (head == "end") {
      if (!in_layer) throw ParseError("circuit line " + std::to_string(line) + ": 'end' outside a layer");
      circuit->append(Layer(std::move(pending)));
      pending = {};
      in_layer = false;
    } else if (!in_layer) {
      throw ParseError("circuit line " + std::to_string(line) + ": gate outside a layer");
    } else if (head == "clifford") {
      std::string name;
      is >> name;
      const CliffordKind k = clifford_from_name(name);
      pending.push_back(Gate::clifford(k, read_support(is, clifford_arity(k), line)));
    } else if (head == "rotation") {
      std::string gen;
      std::string angle;
      is >> gen;
      const Support s = read_support(is, gen.size(), line);
      if (!(is >> angle)) throw ParseError("circuit line " + std::to_string(line) + ": missing angle");
      pending.push_back(Gate::rotation(gen, parse_number(angle, line), s));
    } else if (head == "unitary") {
      std::vector<std::string> toks;
      for (std::string t; is >> t;) toks.push_back(t);
      std::size_t arity = 0;
      if (toks.size() == 1 + 8) arity = 1;
      if (toks.size() == 2 + 32) arity = 2;
      if (arity == 0) throw ParseError("circuit line " + std::to_string(line) + ": malformed unitary");
      std::istringstream qs(toks[0] + (arity == 2 ? " " + toks[1] : ""));
      const Support s = read_support(qs, arity, line);
      std::vector<Complex> m;
      for (std::size_t i = arity; i + 1 < toks.size(); i += 2) {
        m.emplace_back(parse_number(toks[i], line), parse_number(toks[i + 1], line));
      }
      pending.push_back(Gate::unitary(std::move(m), s));
    } else {
      throw ParseError("circuit line " + std::to_string(line) + ": unknown directive '" + head + "'");
    }
  }
  if (in_layer) throw ParseError("circuit text ends inside a layer");
  if (!circuit) throw ParseError("circuit text has no header");
  return *std::move(circuit);
}

}  // namespace pauliprop
