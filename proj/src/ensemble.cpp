#include "pauliprop/ensemble.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "pauliprop/numeric.hpp"

namespace pauliprop {

EnsembleSpec haar_su4_ensemble(const LayeredTopology& topo) {
  EnsembleSpec spec;
  spec.name = "haar_su4/" + topo.topology.name;
  spec.n_qubits = topo.topology.n_qubits;
  for (const auto& layer : topo.layers) {
    std::vector<GateSlot> slots;
    for (const auto& [u, v] : layer) slots.push_back(GateSlot{Support(u, v), SlotFamily::HaarSU4, {}, {}});
    spec.layers.push_back(std::move(slots));
  }
  validate_ensemble(spec);
  return spec;
}

EnsembleSpec rotation_ensemble(const LayeredTopology& one_rep, const std::vector<std::string>& single_qubit,
                               const std::string& two_qubit, std::size_t repetitions, AngleCorrelation angles,
                               std::vector<double> fixed_angles) {
  EnsembleSpec spec;
  spec.name = "rotations/" + one_rep.topology.name;
  spec.n_qubits = one_rep.topology.n_qubits;
  spec.angles = angles;
  spec.fixed_angles = std::move(fixed_angles);
  if (angles == AngleCorrelation::FixedAngles && spec.fixed_angles.empty()) {
    throw InvalidCircuit("fixed-angle ensemble without angles");
  }
  for (const auto& g : single_qubit) {
    if (g.size() != 1) throw InvalidCircuit("single-qubit generator '" + g + "' must be one letter");
  }
  if (!one_rep.layers.empty() && two_qubit.size() != 2) {
    throw InvalidCircuit("two-qubit generator '" + two_qubit + "' must be two letters");
  }
  for (std::size_t r = 0; r < repetitions; ++r) {
    for (const auto& g : single_qubit) {
      std::vector<GateSlot> slots;
      for (Qubit q = 0; q < spec.n_qubits; ++q) slots.push_back(GateSlot{Support(q), SlotFamily::Rotation, g, {}});
      spec.layers.push_back(std::move(slots));
    }
    for (const auto& layer : one_rep.layers) {
      std::vector<GateSlot> slots;
      for (const auto& [u, v] : layer) slots.push_back(GateSlot{Support(u, v), SlotFamily::Rotation, two_qubit, {}});
      spec.layers.push_back(std::move(slots));
    }
  }
  validate_ensemble(spec);
  return spec;
}

void validate_ensemble(const EnsembleSpec& spec) {
  if (spec.n_qubits == 0 || spec.n_qubits > PauliString::kMaxQubits) {
    throw InvalidCircuit("ensemble '" + spec.name + "' has unsupported qubit count");
  }
  for (std::size_t l = 0; l < spec.layers.size(); ++l) {
    const auto& layer = spec.layers[l];
    if (layer.empty()) throw InvalidCircuit("ensemble '" + spec.name + "' layer " + std::to_string(l) + " is empty");
    for (std::size_t i = 0; i < layer.size(); ++i) {
      const auto& slot = layer[i];
      for (Qubit q : slot.support.qubits()) {
        if (q >= spec.n_qubits) throw InvalidCircuit("ensemble slot on qubit " + std::to_string(q) + " out of range");
      }
      const std::size_t arity = slot.support.size();
      if ((slot.family == SlotFamily::HaarSU4 && arity != 2) || (slot.family == SlotFamily::HaarSU2 && arity != 1) ||
          (slot.family == SlotFamily::Rotation && slot.generator.size() != arity) ||
          (slot.family == SlotFamily::Clifford && clifford_arity(slot.clifford) != arity)) {
        throw InvalidCircuit("ensemble slot family does not fit its support");
      }
      if (slot.family == SlotFamily::Rotation && local_index_of(slot.generator) == 0) {
        throw InvalidCircuit("rotation generator is the identity");
      }
      for (std::size_t j = i + 1; j < layer.size(); ++j) {
        if (slot.support.overlaps(layer[j].support)) {
          throw InvalidCircuit("ensemble '" + spec.name + "' layer " + std::to_string(l) + " has overlapping slots");
        }
      }
    }
  }
}

std::vector<Complex> sample_haar_unitary(std::size_t dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  Eigen::MatrixXcd g(dim, dim);
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im);
    }
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    const Complex d = r(j, j);
    q.col(j) *= d / std::abs(d);
  }
  const Complex det = q.determinant();
  q *= std::pow(det, -1.0 / static_cast<double>(dim));

  std::vector<Complex> out(dim * dim);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) out[i * dim + j] = q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  return out;
}

Gate sample_haar_su4(Support s, Rng& rng) {
  if (s.size() != 2) throw InvalidCircuit("SU(4) gate needs two qubits");
  return Gate::unitary(sample_haar_unitary(4, rng), s);
}

std::uint64_t circuit_seed(std::uint64_t master, std::uint64_t index) { return derive_seed(master, index); }

Circuit sample_circuit(const EnsembleSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> angle_dist(0.0, 2.0 * std::numbers::pi);
  const double shared = spec.angles == AngleCorrelation::SharedSingleAngle ? angle_dist(rng) : 0.0;
  std::size_t rotation_index = 0;

  Circuit c(spec.n_qubits);
  for (const auto& slots : spec.layers) {
    std::vector<Gate> gates;
    gates.reserve(slots.size());
    for (const auto& slot : slots) {
      switch (slot.family) {
        case SlotFamily::HaarSU4:
          gates.push_back(sample_haar_su4(slot.support, rng));
          break;
        case SlotFamily::HaarSU2:
          gates.push_back(Gate::unitary(sample_haar_unitary(2, rng), slot.support));
          break;
        case SlotFamily::Clifford:
          gates.push_back(Gate::clifford(slot.clifford, slot.support));
          break;
        case SlotFamily::Rotation: {
          double theta = 0.0;
          switch (spec.angles) {
            case AngleCorrelation::IndependentUniform: theta = angle_dist(rng); break;
            case AngleCorrelation::SharedSingleAngle: theta = shared; break;
            case AngleCorrelation::FixedAngles:
              theta = spec.fixed_angles[rotation_index % spec.fixed_angles.size()];
              break;
          }
          ++rotation_index;
          gates.push_back(Gate::rotation(slot.generator, theta, slot.support));
          break;
        }
      }
    }
    c.append(Layer(std::move(gates)));
  }
  return c;
}

}  // namespace pauliprop
