#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pauliprop/circuit.hpp"
#include "pauliprop/topology.hpp"

namespace pauliprop {

using Rng = std::mt19937_64;

class UnsupportedEnsemble : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class SlotFamily {
  HaarSU4,   ///< fresh Haar-random 4x4 unitary per slot
  HaarSU2,   ///< fresh Haar-random 2x2 unitary per slot
  Rotation,  ///< exp(-i theta G / 2) with a sampled angle
  Clifford,  ///< fixed named Clifford
};

struct GateSlot {
  Support support;
  SlotFamily family = SlotFamily::HaarSU4;
  std::string generator;                      // Rotation only
  CliffordKind clifford = CliffordKind::H;   // Clifford only
};

enum class AngleCorrelation { IndependentUniform, SharedSingleAngle, FixedAngles };

/// A distribution over circuits: a fixed slot layout (circuit-time order) whose
/// gates are drawn independently per slot, subject to the angle correlation.
struct EnsembleSpec {
  std::string name;
  std::size_t n_qubits = 0;
  std::vector<std::vector<GateSlot>> layers;
  AngleCorrelation angles = AngleCorrelation::IndependentUniform;
  /// FixedAngles: assigned cyclically to rotation slots in circuit order.
  std::vector<double> fixed_angles;

  std::size_t depth() const { return layers.size(); }
};

/// Haar-random SU(4) on every edge slot.
EnsembleSpec haar_su4_ensemble(const LayeredTopology& topo);

/// Each repetition applies a layer of single-qubit rotations for every
/// generator in single_qubit (e.g. {"X","Z"}) on all qubits, then the
/// entangling layers of `one_rep` with the two-qubit generator (e.g. "ZZ").
EnsembleSpec rotation_ensemble(const LayeredTopology& one_rep, const std::vector<std::string>& single_qubit,
                               const std::string& two_qubit, std::size_t repetitions,
                               AngleCorrelation angles = AngleCorrelation::IndependentUniform,
                               std::vector<double> fixed_angles = {});

/// Throws InvalidCircuit if slots overlap within a layer or leave the register.
void validate_ensemble(const EnsembleSpec& spec);

/// Haar unitary from the QR decomposition of a complex Ginibre matrix with the
/// phases of diag(R) divided out, rescaled to unit determinant.
std::vector<Complex> sample_haar_unitary(std::size_t dim, Rng& rng);
Gate sample_haar_su4(Support s, Rng& rng);

/// Pure function of (spec, seed).
Circuit sample_circuit(const EnsembleSpec& spec, std::uint64_t seed);

/// Seed of circuit `index` in an ensemble drawn with `master`.
std::uint64_t circuit_seed(std::uint64_t master, std::uint64_t index);

}  // namespace pauliprop
