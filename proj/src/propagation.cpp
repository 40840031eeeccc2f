#include "pauliprop/propagation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "pauliprop/numeric.hpp"

namespace pauliprop {

ProductState::ProductState(std::vector<Bloch> bloch) : bloch_(std::move(bloch)) {
  if (bloch_.empty()) throw std::invalid_argument("ProductState: no qubits");
  for (std::size_t q = 0; q < bloch_.size(); ++q) {
    const auto& b = bloch_[q];
    const double norm2 = b[0] * b[0] + b[1] * b[1] + b[2] * b[2];
    if (norm2 > (1.0 + 1e-12) * (1.0 + 1e-12)) {
      throw std::invalid_argument("ProductState: Bloch vector of qubit " + std::to_string(q) + " is longer than 1");
    }
  }
}

ProductState ProductState::zero_state(std::size_t n) { return ProductState(std::vector<Bloch>(n, Bloch{0.0, 0.0, 1.0})); }
ProductState ProductState::plus_state(std::size_t n) { return ProductState(std::vector<Bloch>(n, Bloch{1.0, 0.0, 0.0})); }

bool ProductState::is_pure(double tol) const {
  return std::all_of(bloch_.begin(), bloch_.end(), [tol](const Bloch& b) {
    return std::abs(std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]) - 1.0) <= tol;
  });
}

BudgetExceeded::BudgetExceeded(std::size_t layer, std::size_t terms, std::size_t budget)
    : std::runtime_error("term budget exceeded at layer " + std::to_string(layer) + ": " + std::to_string(terms) +
                         " terms > " + std::to_string(budget)),
      layer_(layer) {}

double product_state_trace(const PauliString& p, const ProductState& rho) {
  if (p.n_qubits() != rho.n_qubits()) throw SizeMismatch("Pauli string and state sizes differ");
  double v = 1.0;
  for (std::size_t w = 0; w < PauliString::kWords; ++w) {
    std::uint64_t bits = p.x_words()[w] | p.z_words()[w];
    while (bits != 0) {
      const auto b = static_cast<std::size_t>(std::countr_zero(bits));
      bits &= bits - 1;
      const std::size_t q = w * 64 + b;
      v *= rho.bloch(q)[static_cast<std::size_t>(p.at(q)) - 1];
      if (v == 0.0) return 0.0;
    }
  }
  return v;
}

double expectation(const PauliSum& o, const ProductState& rho) {
  if (o.n_qubits() != rho.n_qubits()) throw SizeMismatch("observable and state sizes differ");
  ExactSum acc;
  for (const auto& [p, c] : o) acc.add(c * product_state_trace(p, rho));
  return acc.value();
}

namespace {

using Words = PauliString::Words;

Words support_mask(const Support& s) {
  Words m{};
  for (Qubit q : s.qubits()) m[q >> 6] |= std::uint64_t{1} << (q & 63);
  return m;
}

bool intersects(const Words& a, const Words& b) {
  for (std::size_t w = 0; w < PauliString::kWords; ++w) {
    if ((a[w] & b[w]) != 0) return true;
  }
  return false;
}

struct SparseRow {
  std::array<std::uint8_t, 16> col{};
  std::array<double, 16> val{};
  std::size_t size = 0;
};

/// A gate prepared for repeated application: nonzero PTM entries per row.
struct CompiledGate {
  Support support;
  Words mask{};
  std::vector<SparseRow> rows;
  std::array<std::size_t, 16> local_weight{};
};

CompiledGate compile(const Gate& g, const PTMatrix& ptm) {
  CompiledGate cg;
  cg.support = g.support();
  cg.mask = support_mask(g.support());
  cg.rows.resize(ptm.dim());
  for (std::size_t r = 0; r < ptm.dim(); ++r) {
    for (std::size_t c = 0; c < ptm.dim(); ++c) {
      if (ptm.at(r, c) == 0.0) continue;
      auto& row = cg.rows[r];
      row.col[row.size] = static_cast<std::uint8_t>(c);
      row.val[row.size] = ptm.at(r, c);
      ++row.size;
    }
  }
  for (std::size_t idx = 0; idx < ptm.dim(); ++idx) {
    cg.local_weight[idx] = static_cast<std::size_t>((idx & 3U) != 0) + static_cast<std::size_t>((idx >> 2) != 0);
  }
  return cg;
}

double l2_mass_unordered(const PauliSum::Map& terms) {
  ExactSum acc;
  for (const auto& [p, c] : terms) acc.add(c * c);
  return acc.value();
}

void drop_terms(PauliSum::Map& terms, std::size_t k, double eps) {
  for (auto it = terms.begin(); it != terms.end();) {
    if (it->first.weight() > k || std::abs(it->second) < eps) {
      terms.erase(it++);
    } else {
      ++it;
    }
  }
}

constexpr std::size_t kChunk = std::size_t{1} << 15;

/// In-place U^dag S U for one gate. Outputs whose weight outside `pending`
/// (qubits of gates still to be applied in this layer) exceeds k can never be
/// kept and are not inserted.
void apply_gate_inplace(PauliSum& sum, const CompiledGate& g, std::size_t k, const Words& pending) {
  auto& terms = sum.raw();
  std::vector<PauliSum::Term> touched;
  for (auto it = terms.begin(); it != terms.end();) {
    if (intersects(it->first.support(), g.mask)) {
      touched.emplace_back(*it);
      terms.erase(it++);
    } else {
      ++it;
    }
  }
  std::sort(touched.begin(), touched.end(),
            [](const PauliSum::Term& a, const PauliSum::Term& b) { return a.first < b.first; });

  Words outside{};
  for (std::size_t w = 0; w < PauliString::kWords; ++w) outside[w] = ~(g.mask[w] | pending[w]);

  const std::size_t dim = g.rows.size();
  std::vector<double> vals(std::min(kChunk, touched.size()) * dim);
  std::vector<std::uint8_t> cols(vals.size());
  std::vector<std::uint8_t> counts(std::min(kChunk, touched.size()));

  for (std::size_t begin = 0; begin < touched.size(); begin += kChunk) {
    const auto count = static_cast<std::ptrdiff_t>(std::min(kChunk, touched.size() - begin));
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      const auto& [p, c] = touched[begin + static_cast<std::size_t>(i)];
      const Words supp = p.support();
      std::size_t base = 0;
      for (std::size_t w = 0; w < PauliString::kWords; ++w) base += std::popcount(supp[w] & outside[w]);
      const SparseRow& row = g.rows[local_index(p, g.support)];
      std::size_t n_out = 0;
      const std::size_t off = static_cast<std::size_t>(i) * dim;
      for (std::size_t e = 0; e < row.size; ++e) {
        if (k != TruncationPolicy::kNoLimit && base + g.local_weight[row.col[e]] > k) continue;
        cols[off + n_out] = row.col[e];
        vals[off + n_out] = row.val[e] * c;
        ++n_out;
      }
      counts[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(n_out);
    }
    for (std::size_t i = 0; i < static_cast<std::size_t>(count); ++i) {
      PauliString q = touched[begin + i].first;
      for (std::size_t e = 0; e < counts[i]; ++e) {
        set_local(q, g.support, cols[i * dim + e]);
        sum.add(q, vals[i * dim + e]);
      }
    }
  }
}

}  // namespace

PauliSum apply_gate_adjoint(const PauliSum& s, const Gate& g, const PTMatrix& ptm) {
  for (Qubit q : g.support().qubits()) {
    if (q >= s.n_qubits()) throw SizeMismatch("gate qubit " + std::to_string(q) + " outside the observable");
  }
  if (ptm.support_size() != g.support().size()) throw SizeMismatch("PTM does not match the gate support");
  const Words mask = support_mask(g.support());
  PauliSum out(s.n_qubits());
  out.reserve(s.size());
  std::vector<PauliSum::Term> touched;
  for (const auto& term : s) {
    if (intersects(term.first.support(), mask)) {
      touched.push_back(term);
    } else {
      out.raw().emplace(term);
    }
  }
  std::sort(touched.begin(), touched.end(),
            [](const PauliSum::Term& a, const PauliSum::Term& b) { return a.first < b.first; });
  for (const auto& [p, c] : touched) {
    const std::size_t row = local_index(p, g.support());
    PauliString q = p;
    for (std::size_t col = 0; col < ptm.dim(); ++col) {
      const double t = ptm.at(row, col);
      if (t == 0.0) continue;
      set_local(q, g.support(), col);
      out.add(q, t * c);
    }
  }
  return out;
}

PropagationResult back_propagate(const PauliSum& o, const Circuit& c, const TruncationPolicy& policy,
                                 Execution exec) {
  if (o.n_qubits() != c.n_qubits()) {
    throw SizeMismatch("observable on " + std::to_string(o.n_qubits()) + " qubits, circuit on " +
                       std::to_string(c.n_qubits()));
  }
  if (policy.coeff_eps < 0) throw std::invalid_argument("coefficient threshold must be nonnegative");
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  const std::size_t depth = c.depth();
  const std::size_t k = policy.weight_k;

  PropagationResult result{depth == 0 ? o : sum_truncate_weight(o, k), {}};
  PauliSum& current = result.observable;
  double mass = l2_mass_unordered(current.raw());
  result.stats.initial_mass_truncated = depth == 0 ? 0.0 : sum_l2_mass(o) - mass;
  result.stats.peak_terms = current.size();

  for (std::size_t j = depth; j >= 1; --j) {
    const auto tl = Clock::now();
    const Layer& layer = c.layers()[j - 1];
    const bool final_layer = j == 1;
    const std::size_t layer_k = final_layer ? TruncationPolicy::kNoLimit : k;
    const double layer_eps = final_layer ? 0.0 : policy.coeff_eps;
    LayerStats st;
    st.layer = j;
    st.terms_before = current.size();

    Words pending{};
    for (const auto& g : layer.gates()) {
      const Words m = support_mask(g.support());
      for (std::size_t w = 0; w < PauliString::kWords; ++w) pending[w] |= m[w];
    }
    for (const auto& g : layer.gates()) {
      const PTMatrix ptm = gate_ptm(g);
      const Words m = support_mask(g.support());
      for (std::size_t w = 0; w < PauliString::kWords; ++w) pending[w] &= ~m[w];
      if (exec == Execution::Serial) {
        current = apply_gate_adjoint(current, g, ptm);
      } else {
        apply_gate_inplace(current, compile(g, ptm), layer_k, policy.per_gate ? Words{} : pending);
      }
      result.stats.peak_terms = std::max(result.stats.peak_terms, current.size());
      if (policy.per_gate && !final_layer) drop_terms(current.raw(), layer_k, layer_eps);
    }
    if (!final_layer) drop_terms(current.raw(), layer_k, layer_eps);

    const double after = l2_mass_unordered(current.raw());
    st.mass_truncated = mass - after;
    mass = after;
    st.terms_after = current.size();
    st.millis = std::chrono::duration<double, std::milli>(Clock::now() - tl).count();
    result.stats.layers.push_back(st);
    if (policy.max_terms != 0 && current.size() > policy.max_terms) {
      throw BudgetExceeded(j, current.size(), policy.max_terms);
    }
  }
  result.stats.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  return result;
}

double estimate_expectation(const PauliSum& o, const Circuit& c, const TruncationPolicy& policy,
                            const ProductState& rho, Execution exec) {
  if (o.n_qubits() != rho.n_qubits()) throw SizeMismatch("observable and state sizes differ");
  return expectation(back_propagate(o, c, policy, exec).observable, rho);
}

}  // namespace pauliprop
