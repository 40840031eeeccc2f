#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pauliprop/circuit.hpp"

namespace pauliprop {

using Edge = std::pair<Qubit, Qubit>;

struct Topology {
  std::size_t n_qubits = 0;
  std::vector<Edge> edges;
  std::string name;
};

/// A topology together with an ordered grouping of its edge slots into layers
/// (circuit-time order). Each layer's edges are disjoint.
struct LayeredTopology {
  Topology topology;
  std::vector<std::vector<Edge>> layers;

  std::size_t gate_count() const;
};

/// Throws InvalidCircuit on self-loops or out-of-range qubits.
void validate_topology(const Topology& t);

/// Sequential two-qubit slots along a snake path through a rows x cols grid
/// (row 0 left to right, row 1 right to left, ...). Within one repetition the
/// path edges are emitted in reverse order, one per layer, so back-propagating
/// an observable on the top-left qubit reaches every qubit after one repetition.
LayeredTopology build_staircase_2d(std::size_t rows, std::size_t cols, std::size_t repetitions);

/// Alternating (0,1),(2,3),... and (1,2),(3,4),... layers; `depth` layers total.
LayeredTopology build_brickwork_1d(std::size_t n, std::size_t depth);

/// Parses "u v" edge lines with '#' comments. The qubit count is one more than
/// the largest index unless n_qubits is given.
Topology parse_topology_edges(std::string_view text, std::string name, std::size_t n_qubits = 0);

/// A named builtin ("heavyhex127") or a path to an edge-list file.
Topology load_topology_edges(const std::string& source);

/// Text of the bundled 127-qubit heavy-hex coupling map.
std::string_view heavyhex127_text();

/// Keeps the qubits [0, n) and the edges between them.
Topology induced_subgraph(const Topology& t, std::size_t n);

/// Greedy edge colouring in file order; each colour class becomes a layer.
LayeredTopology matching_layers(const Topology& t);

/// Concatenates `repetitions` copies of the layering.
LayeredTopology repeat_layers(const LayeredTopology& one, std::size_t repetitions);

}  // namespace pauliprop
