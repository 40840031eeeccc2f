#include "pauliprop/error_analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numbers>

#include "pauliprop/numeric.hpp"
#include "pauliprop/oracle.hpp"

namespace pauliprop {

double mse_bound(std::size_t k, double op_norm_sq) {
  if (op_norm_sq < 0) throw std::invalid_argument("mse_bound: negative norm");
  return std::pow(2.0 / 3.0, static_cast<double>(k) + 1.0) * op_norm_sq;
}

PauliCount pauli_count(std::size_t n, std::size_t k) {
  if (n == 0) throw std::invalid_argument("pauli_count: n must be positive");
  if (k > n) throw std::invalid_argument("pauli_count: k = " + std::to_string(k) + " exceeds n = " + std::to_string(n));
  using boost::multiprecision::cpp_int;
  PauliCount out;
  cpp_int term = 1;
  out.exact = 1;
  for (std::size_t l = 1; l <= k; ++l) {
    term = term * 3 * (n - l + 1) / l;
    out.exact += term;
  }
  out.bound = k == 0 ? 1.0 : std::pow(3.0 * std::numbers::e * static_cast<double>(n) / static_cast<double>(k),
                                      static_cast<double>(k));
  return out;
}

bool pauli_count_within_bound(std::size_t n, std::size_t k) {
  using boost::multiprecision::cpp_int;
  const PauliCount c = pauli_count(n, k);
  // e > 2718281828 / 10^9
  const cpp_int lhs = c.exact * boost::multiprecision::pow(cpp_int(k), static_cast<unsigned>(k)) *
                      boost::multiprecision::pow(cpp_int(1000000000), static_cast<unsigned>(k));
  const cpp_int rhs = boost::multiprecision::pow(cpp_int(3 * n), static_cast<unsigned>(k)) *
                      boost::multiprecision::pow(cpp_int(2718281828), static_cast<unsigned>(k));
  return lhs <= rhs;
}

std::size_t chernoff_samples(double eps, double delta) {
  if (!(eps > 0.0)) throw std::invalid_argument("chernoff_samples: eps must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("chernoff_samples: delta must lie in (0, 1)");
  return static_cast<std::size_t>(std::ceil(std::log(2.0 / delta) / (2.0 * eps * eps)));
}

double TransferRow::total() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < size; ++i) acc += prob[i];
  return acc;
}

SecondMomentTransfer::SecondMomentTransfer(std::size_t n_qubits, std::vector<std::vector<SlotTransfer>> layers)
    : n_(n_qubits), layers_(std::move(layers)) {
  slot_of_.assign(layers_.size(), std::vector<int>(n_, -1));
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    for (std::size_t s = 0; s < layers_[l].size(); ++s) {
      for (Qubit q : layers_[l][s].support.qubits()) {
        if (q >= n_) throw InvalidCircuit("transfer slot outside the register");
        if (slot_of_[l][q] != -1) throw InvalidCircuit("transfer slots overlap");
        slot_of_[l][q] = static_cast<int>(s);
      }
    }
  }
}

double SecondMomentTransfer::max_row_error() const {
  double worst = 0.0;
  for (const auto& layer : layers_) {
    for (const auto& slot : layer) {
      for (const auto& row : slot.rows) worst = std::max(worst, std::abs(row.total() - 1.0));
    }
  }
  return worst;
}

namespace {

TransferRow single(std::size_t idx) {
  TransferRow r;
  r.out[0] = static_cast<std::uint8_t>(idx);
  r.prob[0] = 1.0;
  r.size = 1;
  return r;
}

TransferRow uniform_nonidentity(std::size_t dim) {
  TransferRow r;
  for (std::size_t i = 1; i < dim; ++i) {
    r.out[r.size] = static_cast<std::uint8_t>(i);
    r.prob[r.size] = 1.0 / static_cast<double>(dim - 1);
    ++r.size;
  }
  return r;
}

SlotTransfer slot_transfer(const GateSlot& slot) {
  SlotTransfer st;
  st.support = slot.support;
  const std::size_t dim = slot.support.local_dim();
  st.rows.resize(dim);
  st.rows[0] = single(0);
  switch (slot.family) {
    case SlotFamily::HaarSU4:
    case SlotFamily::HaarSU2:
      for (std::size_t i = 1; i < dim; ++i) st.rows[i] = uniform_nonidentity(dim);
      break;
    case SlotFamily::Clifford: {
      const PTMatrix t = gate_ptm(Gate::clifford(slot.clifford, slot.support));
      for (std::size_t i = 1; i < dim; ++i) {
        TransferRow r;
        for (std::size_t j = 0; j < dim; ++j) {
          if (t.at(i, j) == 0.0) continue;
          r.out[r.size] = static_cast<std::uint8_t>(j);
          r.prob[r.size] = t.at(i, j) * t.at(i, j);
          ++r.size;
        }
        st.rows[i] = r;
      }
      break;
    }
    case SlotFamily::Rotation: {
      const std::size_t m = slot.support.size();
      const Support local = m == 1 ? Support(0) : Support(0, 1);
      PauliString g(m);
      set_local(g, local, local_index_of(slot.generator));
      for (std::size_t i = 1; i < dim; ++i) {
        PauliString p(m);
        set_local(p, local, i);
        if (pauli_commutes(p, g)) {
          st.rows[i] = single(i);
          continue;
        }
        TransferRow r;
        r.out[0] = static_cast<std::uint8_t>(i);
        r.out[1] = static_cast<std::uint8_t>(local_index(pauli_multiply(p, g).first, local));
        r.prob[0] = 0.5;
        r.prob[1] = 0.5;
        r.size = 2;
        st.rows[i] = r;
      }
      break;
    }
  }
  return st;
}

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t pick(const TransferRow& row, Rng& rng) {
  if (row.size == 1) return row.out[0];
  const double u = uniform01(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < row.size; ++i) {
    acc += row.prob[i];
    if (u < acc) return row.out[i];
  }
  return row.out[row.size - 1];
}

/// Draws the terminal Pauli with probability a_P^2 / mass.
class TerminalSampler {
 public:
  explicit TerminalSampler(const PauliSum& o) {
    CompensatedSum acc;
    for (const auto& [p, c] : o.sorted_terms()) {
      acc.add(c * c);
      paulis_.push_back(p);
      cum_.push_back(acc.value());
    }
    mass_ = acc.value();
    if (!(mass_ > 0.0)) throw std::invalid_argument("path sampling needs an observable with nonzero mass");
    for (auto& c : cum_) c /= mass_;
    cum_.back() = 1.0;
  }

  double mass() const { return mass_; }
  const PauliString& draw(Rng& rng) const {
    const double u = uniform01(rng);
    const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
    return paulis_[std::min<std::size_t>(static_cast<std::size_t>(it - cum_.begin()), paulis_.size() - 1)];
  }

 private:
  std::vector<PauliString> paulis_;
  std::vector<double> cum_;
  double mass_ = 0.0;
};

struct Walk {
  std::size_t max_weight = 0;  ///< over P_L..P_1
  PauliString p0;
};

Walk walk(const SecondMomentTransfer& t, PauliString p, Rng& rng, std::vector<PauliString>* chain) {
  Walk w;
  const std::size_t depth = t.depth();
  if (depth >= 1) w.max_weight = p.weight();
  if (chain != nullptr) chain->push_back(p);
  std::vector<int> slots;
  for (std::size_t j = depth; j >= 1; --j) {
    const std::size_t li = j - 1;
    const auto& layer = t.layer(li);
    slots.clear();
    const auto supp = p.support();
    for (std::size_t wi = 0; wi < PauliString::kWords; ++wi) {
      std::uint64_t bits = supp[wi];
      while (bits != 0) {
        const std::size_t q = wi * 64 + static_cast<std::size_t>(std::countr_zero(bits));
        bits &= bits - 1;
        const int s = t.slot_on(li, q);
        if (s < 0) continue;
        const Support& sup = layer[static_cast<std::size_t>(s)].support;
        if (sup.size() == 2) {
          const Qubit other = sup[0] == q ? sup[1] : sup[0];
          if (other < q && ((supp[other >> 6] >> (other & 63)) & 1U) != 0) continue;
        }
        slots.push_back(s);
      }
    }
    for (int s : slots) {
      const SlotTransfer& st = layer[static_cast<std::size_t>(s)];
      set_local(p, st.support, pick(st.rows[local_index(p, st.support)], rng));
    }
    if (j >= 2) w.max_weight = std::max(w.max_weight, p.weight());
    if (chain != nullptr) chain->push_back(p);
  }
  w.p0 = p;
  return w;
}

void check_sizes(const EnsembleSpec& spec, const PauliSum& o, const ProductState& rho) {
  if (o.n_qubits() != spec.n_qubits || rho.n_qubits() != spec.n_qubits) {
    throw SizeMismatch("ensemble, observable and state sizes differ");
  }
}

constexpr std::uint64_t kSampleChunk = 4096;

MSEEstimate finish(const MeanAccumulator& acc, double bound) {
  MSEEstimate e;
  e.mean = acc.mean();
  e.std_error = acc.stderr_of_mean();
  e.samples = acc.count();
  e.bound = bound;
  e.exceeds_bound = e.mean > bound + 5.0 * e.std_error;
  return e;
}

std::map<PauliString, double> apply_transfer_layer(const std::map<PauliString, double>& in,
                                                   const std::vector<SlotTransfer>& layer) {
  std::map<PauliString, double> cur = in;
  for (const auto& slot : layer) {
    std::map<PauliString, double> next;
    for (const auto& [p, w] : cur) {
      const std::size_t idx = local_index(p, slot.support);
      if (idx == 0) {
        next[p] += w;
        continue;
      }
      const TransferRow& row = slot.rows[idx];
      PauliString q = p;
      for (std::size_t e = 0; e < row.size; ++e) {
        set_local(q, slot.support, row.out[e]);
        next[q] += w * row.prob[e];
      }
    }
    cur = std::move(next);
  }
  return cur;
}

MeanAccumulator accumulate(const std::vector<double>& values) {
  MeanAccumulator acc;
  for (double v : values) acc.add(v);
  return acc;
}

}  // namespace

SecondMomentTransfer build_transfer(const EnsembleSpec& spec) {
  validate_ensemble(spec);
  std::vector<std::vector<SlotTransfer>> layers;
  for (const auto& slots : spec.layers) {
    std::vector<SlotTransfer> layer;
    for (const auto& slot : slots) {
      if (slot.family == SlotFamily::Rotation && spec.angles != AngleCorrelation::IndependentUniform) {
        throw UnsupportedEnsemble("ensemble '" + spec.name +
                                  "': path sampling needs independent uniform angles; correlated or fixed angles "
                                  "make paths correlated");
      }
      layer.push_back(slot_transfer(slot));
    }
    layers.push_back(std::move(layer));
  }
  return SecondMomentTransfer(spec.n_qubits, std::move(layers));
}

PathSample sample_path(const SecondMomentTransfer& t, const PauliSum& o, const ProductState& rho, std::size_t k,
                       Rng& rng) {
  const TerminalSampler terminal(o);
  PathSample s;
  const Walk w = walk(t, terminal.draw(rng), rng, &s.chain);
  const double d = product_state_trace(w.p0, rho);
  s.truncated = w.max_weight > k;
  s.x = s.truncated ? terminal.mass() * d * d : 0.0;
  return s;
}

namespace {

/// A path contributes to threshold t when its largest intermediate weight
/// exceeds t; t = -1 scores every path.
std::vector<MeanAccumulator> sample_scores(const EnsembleSpec& spec, const PauliSum& o, const ProductState& rho,
                                           const std::vector<long long>& thresholds, std::uint64_t samples,
                                           std::uint64_t seed, Execution exec, double* mass) {
  check_sizes(spec, o, rho);
  if (samples == 0) throw std::invalid_argument("path sampling: samples must be positive");
  const SecondMomentTransfer t = build_transfer(spec);
  const TerminalSampler terminal(o);
  *mass = terminal.mass();
  const std::uint64_t n_chunks = (samples + kSampleChunk - 1) / kSampleChunk;
  std::vector<std::vector<MeanAccumulator>> partial(n_chunks, std::vector<MeanAccumulator>(thresholds.size()));

  const auto run_chunk = [&](std::uint64_t c) {
    Rng rng(derive_seed(seed, c));
    const std::uint64_t end = std::min(samples, (c + 1) * kSampleChunk);
    for (std::uint64_t i = c * kSampleChunk; i < end; ++i) {
      const Walk w = walk(t, terminal.draw(rng), rng, nullptr);
      const double d = product_state_trace(w.p0, rho);
      const double x = terminal.mass() * d * d;
      const auto mw = static_cast<long long>(w.max_weight);
      for (std::size_t ti = 0; ti < thresholds.size(); ++ti) partial[c][ti].add(mw > thresholds[ti] ? x : 0.0);
    }
  };
  if (exec == Execution::Serial) {
    for (std::uint64_t c = 0; c < n_chunks; ++c) run_chunk(c);
  } else {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(n_chunks); ++c) run_chunk(static_cast<std::uint64_t>(c));
  }

  std::vector<MeanAccumulator> out(thresholds.size());
  for (std::size_t ti = 0; ti < thresholds.size(); ++ti) {
    for (const auto& chunk : partial) out[ti].merge(chunk[ti]);
  }
  return out;
}

}  // namespace

std::vector<MSEEstimate> mc_mse_estimate(const EnsembleSpec& spec, const PauliSum& o, const ProductState& rho,
                                         const std::vector<std::size_t>& ks, std::uint64_t samples,
                                         std::uint64_t seed, Execution exec) {
  std::vector<long long> thresholds;
  for (std::size_t k : ks) {
    thresholds.push_back(static_cast<long long>(std::min<std::size_t>(k, PauliString::kMaxQubits)));
  }
  double mass = 0.0;
  const auto acc = sample_scores(spec, o, rho, thresholds, samples, seed, exec, &mass);
  std::vector<MSEEstimate> out;
  for (std::size_t ki = 0; ki < ks.size(); ++ki) out.push_back(finish(acc[ki], mse_bound(ks[ki], mass)));
  return out;
}

MSEEstimate mc_second_moment(const EnsembleSpec& spec, const PauliSum& o, const ProductState& rho,
                             std::uint64_t samples, std::uint64_t seed, Execution exec) {
  double mass = 0.0;
  const auto acc = sample_scores(spec, o, rho, {-1}, samples, seed, exec, &mass);
  MSEEstimate e = finish(acc.front(), mass);
  e.exceeds_bound = false;
  return e;
}

MSEEstimate mc_mse_estimate(const EnsembleSpec& spec, const PauliSum& o, const ProductState& rho, std::size_t k,
                            std::uint64_t samples, std::uint64_t seed, Execution exec) {
  return mc_mse_estimate(spec, o, rho, std::vector<std::size_t>{k}, samples, seed, exec).front();
}

double truncated_second_moment(const SecondMomentTransfer& t, const PauliSum& o, const ProductState& rho,
                               std::size_t k) {
  if (o.n_qubits() != t.n_qubits() || rho.n_qubits() != t.n_qubits()) {
    throw SizeMismatch("transfer, observable and state sizes differ");
  }
  std::map<PauliString, double> cur;
  for (const auto& [p, c] : o) {
    if (t.depth() == 0 || p.weight() <= k) cur[p] += c * c;
  }
  for (std::size_t j = t.depth(); j >= 1; --j) {
    cur = apply_transfer_layer(cur, t.layer(j - 1));
    if (j >= 2) std::erase_if(cur, [k](const auto& kv) { return kv.first.weight() > k; });
  }
  ExactSum acc;
  for (const auto& [p, w] : cur) {
    const double d = product_state_trace(p, rho);
    acc.add(w * d * d);
  }
  return acc.value();
}

double exact_chain_mse(const SecondMomentTransfer& t, const PauliSum& o, const ProductState& rho, std::size_t k) {
  return truncated_second_moment(t, o, rho, TruncationPolicy::kNoLimit) - truncated_second_moment(t, o, rho, k);
}

TrialData run_trials(const EnsembleSpec& spec, const PauliSum& o, const ProductState& rho,
                     const std::vector<std::size_t>& ks, std::size_t trials, std::uint64_t seed) {
  check_sizes(spec, o, rho);
  if (trials == 0) throw std::invalid_argument("trial count must be positive");
  if (spec.n_qubits > kOracleMaxQubits) {
    throw OracleCapExceeded("oracle-based estimates need at most " + std::to_string(kOracleMaxQubits) +
                            " qubits, ensemble has " + std::to_string(spec.n_qubits));
  }
  if (!rho.is_pure(1e-9)) throw std::invalid_argument("oracle-based estimates need a pure product state");
  TrialData d;
  d.ks = ks;
  d.exact.assign(trials, 0.0);
  d.approx.assign(ks.size(), std::vector<double>(trials, 0.0));
  d.mu = o.coeff(PauliString(o.n_qubits()));
  std::vector<double> millis(trials, 0.0);

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(trials); ++i) {
    const auto ti = static_cast<std::size_t>(i);
    const Circuit c = sample_circuit(spec, circuit_seed(seed, ti));
    d.exact[ti] = statevector_expectation(c, o, rho);
    const auto t0 = std::chrono::steady_clock::now();
    for (std::size_t ki = 0; ki < ks.size(); ++ki) {
      TruncationPolicy policy;
      policy.weight_k = ks[ki];
      d.approx[ki][ti] = estimate_expectation(o, c, policy, rho);
    }
    millis[ti] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  }
  for (double m : millis) d.propagation_ms += m;
  return d;
}

MSEEstimate empirical_mse(const TrialData& d, std::size_t k_index, double op_norm_sq) {
  std::vector<double> sq(d.exact.size());
  for (std::size_t i = 0; i < sq.size(); ++i) {
    const double diff = d.exact[i] - d.approx[k_index][i];
    sq[i] = diff * diff;
  }
  return finish(accumulate(sq), mse_bound(d.ks[k_index], op_norm_sq));
}

MSEEstimate empirical_mse(const EnsembleSpec& spec, const PauliSum& o, const ProductState& rho, std::size_t k,
                          std::size_t trials, std::uint64_t seed) {
  return empirical_mse(run_trials(spec, o, rho, {k}, trials, seed), 0, sum_l2_mass(o));
}

namespace {

TrivialStats spread(const std::vector<double>& values, double mu) {
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = (values[i] - mu) * (values[i] - mu);
  const MeanAccumulator acc = accumulate(sq);
  return {mu, acc.mean(), acc.stderr_of_mean()};
}

}  // namespace

TrivialStats trivial_estimator_stats(const TrialData& d) { return spread(d.exact, d.mu); }

TrivialStats trivial_estimator_stats(const EnsembleSpec& spec, const PauliSum& o, const ProductState& rho,
                                     std::size_t trials, std::uint64_t seed) {
  return trivial_estimator_stats(run_trials(spec, o, rho, {}, trials, seed));
}

TrivialStats truncated_variance(const TrialData& d, std::size_t k_index) { return spread(d.approx[k_index], d.mu); }

VarianceGap variance_gap(const TrialData& d, std::size_t k_index) {
  const auto& f = d.exact;
  const auto& ft = d.approx[k_index];
  std::vector<double> g(f.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = 2.0 * (ft[i] - f[i]) * (ft[i] - d.mu);
  const MeanAccumulator acc = accumulate(g);
  VarianceGap out;
  out.mse = empirical_mse(d, k_index, 0.0).mean;
  out.var_exact = trivial_estimator_stats(d).variance;
  out.var_truncated = truncated_variance(d, k_index).variance;
  out.gap = acc.mean();
  out.sigma = acc.stderr_of_mean();
  return out;
}

double weight1_variance_brickwork(std::size_t depth, const PauliSum& o) {
  double mass = 0.0;
  for (const auto& [p, c] : o.sorted_terms()) {
    if (p.weight() == 1) mass += c * c;
  }
  return 0.2 * std::pow(0.4, static_cast<double>(depth)) * mass;
}

MarkovCheck markov_check(const TrialData& d, std::size_t k_index, double eps, double bound) {
  if (!(eps > 0.0)) throw std::invalid_argument("markov_check: eps must be positive");
  const std::size_t n = d.exact.size();
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(d.exact[i] - d.approx[k_index][i]) > eps) ++hits;
  }
  MarkovCheck m;
  m.fraction = static_cast<double>(hits) / static_cast<double>(n);
  const double q = std::min(1.0, bound / (eps * eps));
  m.limit = q + 3.0 * std::sqrt(q * (1.0 - q) / static_cast<double>(n));
  m.pass = m.fraction <= m.limit;
  return m;
}

}  // namespace pauliprop
