#include "pauliprop/topology.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace pauliprop {

std::size_t LayeredTopology::gate_count() const {
  std::size_t c = 0;
  for (const auto& l : layers) c += l.size();
  return c;
}

void validate_topology(const Topology& t) {
  if (t.n_qubits == 0) throw InvalidCircuit("topology '" + t.name + "' has no qubits");
  for (const auto& [u, v] : t.edges) {
    if (u == v) throw InvalidCircuit("topology '" + t.name + "': self-loop on qubit " + std::to_string(u));
    if (u >= t.n_qubits || v >= t.n_qubits) {
      throw InvalidCircuit("topology '" + t.name + "': edge (" + std::to_string(u) + "," + std::to_string(v) +
                           ") out of range");
    }
  }
}

LayeredTopology build_staircase_2d(std::size_t rows, std::size_t cols, std::size_t repetitions) {
  if (rows == 0 || cols == 0 || rows * cols < 2) throw InvalidCircuit("staircase needs at least two qubits");
  if (repetitions == 0) throw InvalidCircuit("staircase needs at least one repetition");
  std::vector<Qubit> path;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t col = (r % 2 == 0) ? c : cols - 1 - c;
      path.push_back(static_cast<Qubit>(r * cols + col));
    }
  }
  LayeredTopology one;
  one.topology.n_qubits = rows * cols;
  one.topology.name = "staircase_" + std::to_string(rows) + "x" + std::to_string(cols);
  for (std::size_t i = path.size() - 1; i-- > 0;) {
    const Edge e{path[i], path[i + 1]};
    one.topology.edges.push_back(e);
    one.layers.push_back({e});
  }
  return repeat_layers(one, repetitions);
}

LayeredTopology build_brickwork_1d(std::size_t n, std::size_t depth) {
  if (n < 2) throw InvalidCircuit("brickwork needs at least two qubits");
  LayeredTopology out;
  out.topology.n_qubits = n;
  out.topology.name = "brickwork_" + std::to_string(n);
  for (std::size_t q = 0; q + 1 < n; ++q) out.topology.edges.emplace_back(q, q + 1);
  for (std::size_t l = 0; l < depth; ++l) {
    std::vector<Edge> layer;
    for (std::size_t q = l % 2; q + 1 < n; q += 2) layer.emplace_back(q, q + 1);
    if (!layer.empty()) out.layers.push_back(std::move(layer));
  }
  return out;
}

Topology parse_topology_edges(std::string_view text, std::string name, std::size_t n_qubits) {
  Topology t;
  t.name = std::move(name);
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  Qubit max_q = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto h = line.find('#'); h != std::string::npos) line.resize(h);
    std::istringstream ls(line);
    long long u = 0;
    long long v = 0;
    if (!(ls >> u)) continue;
    std::string extra;
    if (!(ls >> v) || (ls >> extra) || u < 0 || v < 0) {
      throw ParseError(t.name + ":" + std::to_string(line_no) + ": expected 'u v'");
    }
    if (u == v) throw InvalidCircuit(t.name + ":" + std::to_string(line_no) + ": self-loop on qubit " + std::to_string(u));
    t.edges.emplace_back(static_cast<Qubit>(u), static_cast<Qubit>(v));
    max_q = std::max({max_q, static_cast<Qubit>(u), static_cast<Qubit>(v)});
  }
  if (t.edges.empty()) throw ParseError(t.name + ": no edges");
  t.n_qubits = n_qubits == 0 ? static_cast<std::size_t>(max_q) + 1 : n_qubits;
  validate_topology(t);
  return t;
}

Topology load_topology_edges(const std::string& source) {
  if (source == "heavyhex127") return parse_topology_edges(heavyhex127_text(), "heavyhex127", 127);
  std::ifstream in(source);
  if (!in) throw ParseError("unknown topology builtin or unreadable file '" + source + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_topology_edges(buf.str(), source);
}

Topology induced_subgraph(const Topology& t, std::size_t n) {
  if (n == 0 || n > t.n_qubits) throw InvalidCircuit("induced subgraph size out of range");
  Topology out;
  out.n_qubits = n;
  out.name = t.name + "[0:" + std::to_string(n) + ")";
  for (const auto& e : t.edges) {
    if (e.first < n && e.second < n) out.edges.push_back(e);
  }
  return out;
}

LayeredTopology matching_layers(const Topology& t) {
  validate_topology(t);
  LayeredTopology out;
  out.topology = t;
  std::vector<std::vector<bool>> used;  // used[colour][qubit]
  for (const auto& e : t.edges) {
    std::size_t colour = 0;
    while (colour < used.size() && (used[colour][e.first] || used[colour][e.second])) ++colour;
    if (colour == used.size()) {
      used.emplace_back(t.n_qubits, false);
      out.layers.emplace_back();
    }
    used[colour][e.first] = used[colour][e.second] = true;
    out.layers[colour].push_back(e);
  }
  return out;
}

LayeredTopology repeat_layers(const LayeredTopology& one, std::size_t repetitions) {
  LayeredTopology out;
  out.topology = one.topology;
  for (std::size_t r = 0; r < repetitions; ++r) {
    out.layers.insert(out.layers.end(), one.layers.begin(), one.layers.end());
  }
  return out;
}

}  // namespace pauliprop
