#include "pauliprop/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "pauliprop/error_analysis.hpp"
#include "pauliprop/numeric.hpp"
#include "pauliprop/oracle.hpp"
#include "pauliprop/topology.hpp"

namespace pauliprop {

using nlohmann::json;

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw ConfigError("config field '" + field + "': " + what);
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      field_error(where.empty() ? key : where + "." + key, "unknown field");
    }
  }
}

const json* find(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

std::string path_of(const std::string& where, const char* key) { return where.empty() ? key : where + "." + key; }

std::uint64_t get_uint(const json& obj, const std::string& where, const char* key, std::optional<std::uint64_t> def) {
  const json* v = find(obj, key);
  if (v == nullptr) {
    if (def) return *def;
    field_error(path_of(where, key), "required");
  }
  if (!v->is_number_unsigned()) field_error(path_of(where, key), "expected a nonnegative integer");
  return v->get<std::uint64_t>();
}

double get_double(const json& obj, const std::string& where, const char* key, double def) {
  const json* v = find(obj, key);
  if (v == nullptr) return def;
  if (!v->is_number()) field_error(path_of(where, key), "expected a number");
  return v->get<double>();
}

bool get_bool(const json& obj, const std::string& where, const char* key, bool def) {
  const json* v = find(obj, key);
  if (v == nullptr) return def;
  if (!v->is_boolean()) field_error(path_of(where, key), "expected true or false");
  return v->get<bool>();
}

std::string get_string(const json& obj, const std::string& where, const char* key, std::optional<std::string> def) {
  const json* v = find(obj, key);
  if (v == nullptr) {
    if (def) return *def;
    field_error(path_of(where, key), "required");
  }
  if (!v->is_string()) field_error(path_of(where, key), "expected a string");
  return v->get<std::string>();
}

std::vector<std::size_t> get_uint_list(const json& obj, const char* key) {
  const json* v = find(obj, key);
  if (v == nullptr) field_error(key, "required");
  if (!v->is_array() || v->empty()) field_error(key, "expected a nonempty array of nonnegative integers");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < v->size(); ++i) {
    if (!(*v)[i].is_number_unsigned()) field_error(std::string(key) + "[" + std::to_string(i) + "]", "expected a nonnegative integer");
    out.push_back((*v)[i].get<std::size_t>());
  }
  return out;
}

std::vector<std::string> get_string_list(const json& obj, const std::string& where, const char* key) {
  const json* v = find(obj, key);
  if (v == nullptr) return {};
  if (!v->is_array()) field_error(path_of(where, key), "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v->size(); ++i) {
    if (!(*v)[i].is_string()) field_error(path_of(where, key) + "[" + std::to_string(i) + "]", "expected a string");
    out.push_back((*v)[i].get<std::string>());
  }
  return out;
}

std::size_t line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

LayeredTopology one_repetition(const ExperimentConfig& cfg) {
  const auto& t = cfg.topology;
  if (t.builder == "staircase_2d") return build_staircase_2d(t.rows, t.cols, 1);
  Topology topo = load_topology_edges(t.builder == "heavyhex127" ? std::string("heavyhex127") : t.path);
  if (t.induced_qubits != 0) topo = induced_subgraph(topo, t.induced_qubits);
  return matching_layers(topo);
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config syntax error at line " + std::to_string(line_of(text, e.byte)) + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  check_keys(j, "", {"name", "topology", "ensemble", "depths", "ks", "observable", "state", "estimators", "samples",
                     "trials", "seed", "output_dir", "truncation", "timing", "weights_k", "comment"});

  ExperimentConfig cfg;
  cfg.config_hash = fnv1a64(text);
  cfg.name = get_string(j, "", "name", std::nullopt);

  const json* topo = find(j, "topology");
  if (topo == nullptr || !topo->is_object()) field_error("topology", "required object");
  check_keys(*topo, "topology", {"builder", "rows", "cols", "n", "path", "induced_qubits"});
  auto& t = cfg.topology;
  t.builder = get_string(*topo, "topology", "builder", std::nullopt);
  if (t.builder == "staircase_2d") {
    t.rows = get_uint(*topo, "topology", "rows", std::nullopt);
    t.cols = get_uint(*topo, "topology", "cols", std::nullopt);
    if (t.rows * t.cols < 2) field_error("topology.rows", "staircase needs rows * cols >= 2");
  } else if (t.builder == "brickwork_1d") {
    t.n = get_uint(*topo, "topology", "n", std::nullopt);
    if (t.n < 2) field_error("topology.n", "brickwork needs n >= 2");
  } else if (t.builder == "heavyhex127" || t.builder == "edges_file") {
    if (t.builder == "edges_file") t.path = get_string(*topo, "topology", "path", std::nullopt);
    t.induced_qubits = get_uint(*topo, "topology", "induced_qubits", 0);
  } else {
    field_error("topology.builder", "unknown builder '" + t.builder +
                                        "' (staircase_2d, brickwork_1d, heavyhex127, edges_file)");
  }

  const json* ens = find(j, "ensemble");
  if (ens == nullptr || !ens->is_object()) field_error("ensemble", "required object");
  check_keys(*ens, "ensemble", {"family", "single_qubit", "two_qubit", "angles", "fixed_angles"});
  auto& e = cfg.ensemble;
  e.family = get_string(*ens, "ensemble", "family", std::nullopt);
  if (e.family == "rotations") {
    e.single_qubit = get_string_list(*ens, "ensemble", "single_qubit");
    e.two_qubit = get_string(*ens, "ensemble", "two_qubit", std::nullopt);
    const std::string angles = get_string(*ens, "ensemble", "angles", "independent");
    if (angles == "independent") {
      e.angles = AngleCorrelation::IndependentUniform;
    } else if (angles == "shared") {
      e.angles = AngleCorrelation::SharedSingleAngle;
    } else if (angles == "fixed") {
      e.angles = AngleCorrelation::FixedAngles;
      const json* fa = find(*ens, "fixed_angles");
      if (fa == nullptr || !fa->is_array() || fa->empty()) field_error("ensemble.fixed_angles", "required nonempty array");
      for (const auto& a : *fa) {
        if (!a.is_number()) field_error("ensemble.fixed_angles", "expected numbers");
        e.fixed_angles.push_back(a.get<double>());
      }
    } else {
      field_error("ensemble.angles", "expected independent, shared or fixed");
    }
  } else if (e.family != "haar_su4") {
    field_error("ensemble.family", "unknown family '" + e.family + "' (haar_su4, rotations)");
  }

  cfg.depths = get_uint_list(j, "depths");
  cfg.ks = get_uint_list(j, "ks");
  cfg.observable = get_string(j, "", "observable", std::nullopt);
  cfg.state = get_string(j, "", "state", "zero");
  if (cfg.state != "zero" && cfg.state != "plus") field_error("state", "expected zero or plus");
  for (const auto& est : get_string_list(j, "", "estimators")) {
    static const std::set<std::string> kKnown = {"propagate", "mc_mse", "empirical_mse", "trivial", "bound"};
    if (kKnown.count(est) == 0) field_error("estimators", "unknown estimator '" + est + "'");
    cfg.estimators.insert(est);
  }
  if (cfg.estimators.empty()) field_error("estimators", "required nonempty list");
  cfg.samples = get_uint(j, "", "samples", 10000);
  cfg.trials = get_uint(j, "", "trials", 100);
  cfg.seed = get_uint(j, "", "seed", std::nullopt);
  cfg.output_dir = get_string(j, "", "output_dir", "");
  cfg.timing = get_bool(j, "", "timing", true);
  if (find(j, "weights_k") != nullptr) cfg.weights_k = get_uint(j, "", "weights_k", std::nullopt);
  if (const json* tr = find(j, "truncation")) {
    if (!tr->is_object()) field_error("truncation", "expected an object");
    check_keys(*tr, "truncation", {"coeff_eps", "max_terms", "per_gate"});
    cfg.coeff_eps = get_double(*tr, "truncation", "coeff_eps", 0.0);
    if (cfg.coeff_eps < 0) field_error("truncation.coeff_eps", "must be nonnegative");
    cfg.max_terms = get_uint(*tr, "truncation", "max_terms", 0);
    cfg.per_gate = get_bool(*tr, "truncation", "per_gate", false);
  }
  if (cfg.samples == 0) field_error("samples", "must be positive");
  if (cfg.trials == 0) field_error("trials", "must be positive");

  // Semantic checks that need the built objects.
  std::size_t n = 0;
  try {
    n = config_qubits(cfg);
  } catch (const std::exception& ex) {
    field_error("topology", ex.what());
  }
  for (std::size_t k : cfg.ks) {
    if (k > n) field_error("ks", "k = " + std::to_string(k) + " exceeds the qubit count " + std::to_string(n));
  }
  if (cfg.weights_k && *cfg.weights_k > n) field_error("weights_k", "exceeds the qubit count");
  try {
    config_observable(cfg);
  } catch (const std::exception& ex) {
    field_error("observable", ex.what());
  }
  try {
    config_ensemble(cfg, 1);
  } catch (const std::exception& ex) {
    field_error("ensemble", ex.what());
  }
  if (cfg.estimators.count("empirical_mse") != 0 && n > kOracleMaxQubits) {
    field_error("estimators", "empirical_mse needs at most " + std::to_string(kOracleMaxQubits) + " qubits, config has " +
                                  std::to_string(n));
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::size_t config_qubits(const ExperimentConfig& cfg) {
  const auto& t = cfg.topology;
  if (t.builder == "staircase_2d") return t.rows * t.cols;
  if (t.builder == "brickwork_1d") return t.n;
  return one_repetition(cfg).topology.n_qubits;
}

EnsembleSpec config_ensemble(const ExperimentConfig& cfg, std::size_t depth) {
  LayeredTopology one;
  std::size_t reps = depth;
  if (cfg.topology.builder == "brickwork_1d") {
    one = build_brickwork_1d(cfg.topology.n, depth);
    reps = 1;
  } else {
    one = one_repetition(cfg);
  }
  EnsembleSpec spec;
  if (cfg.ensemble.family == "haar_su4") {
    spec = haar_su4_ensemble(repeat_layers(one, reps));
  } else {
    spec = rotation_ensemble(one, cfg.ensemble.single_qubit, cfg.ensemble.two_qubit, reps, cfg.ensemble.angles,
                             cfg.ensemble.fixed_angles);
  }
  if (depth == 0) spec.layers.clear();
  spec.n_qubits = one.topology.n_qubits;
  return spec;
}

PauliSum config_observable(const ExperimentConfig& cfg) {
  const std::size_t n = config_qubits(cfg);
  return PauliSum::parse(cfg.observable, n);
}

ProductState config_state(const ExperimentConfig& cfg) {
  const std::size_t n = config_qubits(cfg);
  return cfg.state == "plus" ? ProductState::plus_state(n) : ProductState::zero_state(n);
}

bool SweepResult::all_ok() const {
  return std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.status == "ok"; });
}

namespace {

std::string status_text(const std::exception& e) {
  std::string s = e.what();
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return "error: " + s;
}

TruncationPolicy policy_for(const ExperimentConfig& cfg, std::size_t k) {
  TruncationPolicy p;
  p.weight_k = k;
  p.coeff_eps = cfg.coeff_eps;
  p.max_terms = cfg.max_terms;
  p.per_gate = cfg.per_gate;
  return p;
}

struct DepthCell {
  std::vector<SweepRow> rows;
  std::vector<LayerRow> layers;
};

DepthCell run_depth(const ExperimentConfig& cfg, std::size_t depth) {
  const std::size_t nk = cfg.ks.size();
  DepthCell cell;
  cell.rows.resize(nk);
  for (std::size_t ki = 0; ki < nk; ++ki) {
    cell.rows[ki].depth = depth;
    cell.rows[ki].k = cfg.ks[ki];
  }
  const auto fail_all = [&](const std::string& status) {
    for (auto& r : cell.rows) {
      if (r.status == "ok") r.status = status;
    }
  };

  const std::uint64_t cell_seed = derive_seed(cfg.seed, depth);
  const auto& est = cfg.estimators;
  try {
    const EnsembleSpec spec = config_ensemble(cfg, depth);
    const PauliSum o = config_observable(cfg);
    const ProductState rho = config_state(cfg);
    const double mass = sum_l2_mass(o);

    if (est.count("bound") != 0) {
      for (auto& r : cell.rows) r.bound = mse_bound(r.k, mass);
    }

    if (est.count("propagate") != 0) {
      const Circuit c = sample_circuit(spec, circuit_seed(cell_seed, 0));
      for (std::size_t ki = 0; ki < nk; ++ki) {
        auto& r = cell.rows[ki];
        try {
          const PropagationResult res = back_propagate(o, c, policy_for(cfg, r.k));
          r.estimate = expectation(res.observable, rho);
          r.runtime_ms = cfg.timing ? res.stats.wall_ms : 0.0;
          r.peak_terms = res.stats.peak_terms;
          for (LayerStats st : res.stats.layers) {
            if (!cfg.timing) st.millis = 0.0;
            cell.layers.push_back({depth, r.k, st});
          }
        } catch (const BudgetExceeded& e) {
          r.status = "budget_exceeded_layer_" + std::to_string(e.layer());
        }
      }
    }

    if (est.count("mc_mse") != 0) {
      try {
        const auto mc = mc_mse_estimate(spec, o, rho, cfg.ks, cfg.samples, derive_seed(cell_seed, 1));
        for (std::size_t ki = 0; ki < nk; ++ki) {
          cell.rows[ki].mse_mean = mc[ki].mean;
          cell.rows[ki].mse_stderr = mc[ki].std_error;
        }
      } catch (const std::exception& e) {
        fail_all(status_text(e));
      }
    }

    const bool oracle_ok = spec.n_qubits <= kOracleMaxQubits && rho.is_pure(1e-9);
    const bool want_emp = est.count("empirical_mse") != 0;
    const bool want_trivial = est.count("trivial") != 0;
    if (want_emp || (want_trivial && oracle_ok)) {
      try {
        const TrialData d =
            run_trials(spec, o, rho, want_emp ? cfg.ks : std::vector<std::size_t>{}, cfg.trials, derive_seed(cell_seed, 2));
        for (std::size_t ki = 0; want_emp && ki < nk; ++ki) {
          const MSEEstimate m = empirical_mse(d, ki, mass);
          cell.rows[ki].emp_mse_mean = m.mean;
          cell.rows[ki].emp_mse_stderr = m.std_error;
        }
        if (want_trivial) {
          const double v = trivial_estimator_stats(d).variance;
          for (auto& r : cell.rows) r.var_trivial = v;
        }
      } catch (const std::exception& e) {
        fail_all(status_text(e));
      }
    } else if (want_trivial) {
      // Beyond the oracle: E f^2 - mu^2 by path sampling.
      try {
        const double mu = o.coeff(PauliString(o.n_qubits()));
        const MSEEstimate m2 = mc_second_moment(spec, o, rho, cfg.samples, derive_seed(cell_seed, 3));
        for (auto& r : cell.rows) r.var_trivial = std::max(0.0, m2.mean - mu * mu);
      } catch (const std::exception& e) {
        fail_all(status_text(e));
      }
    }
  } catch (const std::exception& e) {
    fail_all(status_text(e));
  }
  return cell;
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig& cfg) {
  std::vector<DepthCell> cells(cfg.depths.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(cfg.depths.size()); ++i) {
    cells[static_cast<std::size_t>(i)] = run_depth(cfg, cfg.depths[static_cast<std::size_t>(i)]);
  }
  SweepResult out;
  for (auto& c : cells) {
    out.rows.insert(out.rows.end(), c.rows.begin(), c.rows.end());
    out.layers.insert(out.layers.end(), c.layers.begin(), c.layers.end());
  }
  return out;
}

std::vector<WeightRow> run_weights(const ExperimentConfig& cfg) {
  const PauliSum o = config_observable(cfg);
  const std::size_t k = cfg.weights_k.value_or(*std::max_element(cfg.ks.begin(), cfg.ks.end()));
  std::vector<WeightRow> rows;
  for (std::size_t depth : cfg.depths) {
    const EnsembleSpec spec = config_ensemble(cfg, depth);
    const Circuit c = sample_circuit(spec, circuit_seed(derive_seed(cfg.seed, depth), 0));
    const PropagationResult res = back_propagate(o, c, policy_for(cfg, k));
    for (const auto& [w, bin] : sum_weight_histogram(res.observable)) rows.push_back({depth, w, bin.term_count, bin.l2_mass});
  }
  return rows;
}

std::string csv_header_comment(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "# pauliprop " << PAULIPROP_VERSION << " config_hash=" << std::hex;
  os.width(16);
  os.fill('0');
  os << cfg.config_hash << std::dec << " seed=" << cfg.seed;
  return os.str();
}

namespace {

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }
std::string cell(const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : std::string(); }

json jcell(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
json jcell(const std::optional<std::size_t>& v) { return v ? json(*v) : json(nullptr); }

json meta(const ExperimentConfig& cfg) {
  std::ostringstream hash;
  hash << std::hex;
  hash.width(16);
  hash.fill('0');
  hash << cfg.config_hash;
  return json{{"tool", "pauliprop"}, {"version", PAULIPROP_VERSION}, {"config_hash", hash.str()},
              {"seed", cfg.seed}, {"name", cfg.name}};
}

}  // namespace

void write_sweep_csv(std::ostream& os, const ExperimentConfig& cfg, const SweepResult& r) {
  os << csv_header_comment(cfg) << '\n';
  os << "depth,k,status,estimate,mse_mean,mse_stderr,bound,var_trivial,emp_mse_mean,emp_mse_stderr,runtime_ms,peak_terms\n";
  for (const auto& row : r.rows) {
    os << row.depth << ',' << row.k << ',' << row.status << ',' << cell(row.estimate) << ',' << cell(row.mse_mean) << ','
       << cell(row.mse_stderr) << ',' << cell(row.bound) << ',' << cell(row.var_trivial) << ','
       << cell(row.emp_mse_mean) << ',' << cell(row.emp_mse_stderr) << ',' << cell(row.runtime_ms) << ','
       << cell(row.peak_terms) << '\n';
  }
}

void write_sweep_json(std::ostream& os, const ExperimentConfig& cfg, const SweepResult& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back(json{{"depth", row.depth},
                        {"k", row.k},
                        {"status", row.status},
                        {"estimate", jcell(row.estimate)},
                        {"mse_mean", jcell(row.mse_mean)},
                        {"mse_stderr", jcell(row.mse_stderr)},
                        {"bound", jcell(row.bound)},
                        {"var_trivial", jcell(row.var_trivial)},
                        {"emp_mse_mean", jcell(row.emp_mse_mean)},
                        {"emp_mse_stderr", jcell(row.emp_mse_stderr)},
                        {"runtime_ms", jcell(row.runtime_ms)},
                        {"peak_terms", jcell(row.peak_terms)}});
  }
  json doc = meta(cfg);
  doc["rows"] = std::move(rows);
  os << doc.dump(2) << '\n';
}

void write_layers_csv(std::ostream& os, const ExperimentConfig& cfg, const SweepResult& r) {
  os << csv_header_comment(cfg) << '\n';
  os << "depth,k,layer,terms_before,terms_after,mass_truncated,millis\n";
  for (const auto& l : r.layers) {
    os << l.depth << ',' << l.k << ',' << l.stats.layer << ',' << l.stats.terms_before << ',' << l.stats.terms_after
       << ',' << format_double(l.stats.mass_truncated) << ',' << format_double(l.stats.millis) << '\n';
  }
}

void write_layers_json(std::ostream& os, const ExperimentConfig& cfg, const SweepResult& r) {
  json rows = json::array();
  for (const auto& l : r.layers) {
    rows.push_back(json{{"depth", l.depth},
                        {"k", l.k},
                        {"layer", l.stats.layer},
                        {"terms_before", l.stats.terms_before},
                        {"terms_after", l.stats.terms_after},
                        {"mass_truncated", l.stats.mass_truncated},
                        {"millis", l.stats.millis}});
  }
  json doc = meta(cfg);
  doc["rows"] = std::move(rows);
  os << doc.dump(2) << '\n';
}

void write_weights_csv(std::ostream& os, const ExperimentConfig& cfg, const std::vector<WeightRow>& rows) {
  os << csv_header_comment(cfg) << '\n';
  os << "depth,weight,term_count,l2_mass\n";
  for (const auto& r : rows) {
    os << r.depth << ',' << r.weight << ',' << r.term_count << ',' << format_double(r.l2_mass) << '\n';
  }
}

void write_weights_json(std::ostream& os, const ExperimentConfig& cfg, const std::vector<WeightRow>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    out.push_back(json{{"depth", r.depth}, {"weight", r.weight}, {"term_count", r.term_count}, {"l2_mass", r.l2_mass}});
  }
  json doc = meta(cfg);
  doc["rows"] = std::move(out);
  os << doc.dump(2) << '\n';
}

namespace {

Circuit random_clifford_circuit(std::size_t n, std::size_t depth, Rng& rng) {
  static constexpr CliffordKind kOne[] = {CliffordKind::H, CliffordKind::S, CliffordKind::X, CliffordKind::Y,
                                          CliffordKind::Z};
  static constexpr CliffordKind kTwo[] = {CliffordKind::CNOT, CliffordKind::CZ, CliffordKind::SWAP};
  Circuit c(n);
  for (std::size_t l = 0; l < depth; ++l) {
    std::vector<Gate> gates;
    std::size_t q = l % 2;
    while (q < n) {
      if (q + 1 < n && rng() % 2 == 0) {
        const Qubit a = static_cast<Qubit>(rng() % 2 == 0 ? q : q + 1);
        const Qubit b = static_cast<Qubit>(a == q ? q + 1 : q);
        gates.push_back(Gate::clifford(kTwo[rng() % 3], Support(a, b)));
        q += 2;
      } else {
        gates.push_back(Gate::clifford(kOne[rng() % 5], Support(static_cast<Qubit>(q))));
        q += 1;
      }
    }
    c.append(Layer(std::move(gates)));
  }
  return c;
}

ProductState random_pure_state(std::size_t n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<ProductState::Bloch> b(n);
  for (auto& v : b) {
    double norm = 0.0;
    while (norm < 1e-6) {
      v = {normal(rng), normal(rng), normal(rng)};
      norm = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    }
    for (double& x : v) x /= norm;
  }
  return ProductState(b);
}

Gate random_gate(std::size_t kind, Rng& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  static const char* kLetters[] = {"X", "Y", "Z"};
  switch (kind) {
    case 0: {
      const auto k = static_cast<CliffordKind>(rng() % 8);
      if (clifford_arity(k) == 1) return Gate::clifford(k, Support(0));
      return Gate::clifford(k, rng() % 2 == 0 ? Support(0, 1) : Support(1, 0));
    }
    case 1: {
      std::string g;
      do {
        g = std::string("IXYZ").substr(rng() % 4, 1) + std::string("IXYZ").substr(rng() % 4, 1);
      } while (g == "II");
      return Gate::rotation(g, angle(rng), Support(0, 1));
    }
    case 2: return Gate::rotation(kLetters[rng() % 3], angle(rng), Support(0));
    case 3: return sample_haar_su4(Support(0, 1), rng);
    default: return Gate::unitary(sample_haar_unitary(2, rng), Support(0));
  }
}

}  // namespace

std::vector<ValidationCheck> run_validation(std::size_t n, std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw std::invalid_argument("validate: trials must be positive");
  if (n < 2) throw std::invalid_argument("validate: n must be at least 2");
  if (n > kOracleMaxQubits) {
    throw OracleCapExceeded("validate: n = " + std::to_string(n) + " exceeds the oracle cap of " +
                            std::to_string(kOracleMaxQubits));
  }
  std::vector<ValidationCheck> out;
  Rng rng(derive_seed(seed, 0));
  const PauliSum z0 = PauliSum::from_pauli(PauliString::single(n, 0, Pauli::Z));

  {
    ValidationCheck c{"exactness_k_eq_n", true, 0.0, 1e-9, ""};
    for (std::size_t t = 0; t < trials; ++t) {
      Circuit circ(n);
      const std::size_t depth = 1 + t % 6;
      switch (t % 4) {
        case 0: circ = sample_circuit(haar_su4_ensemble(build_brickwork_1d(n, depth)), rng()); break;
        case 1: circ = sample_circuit(haar_su4_ensemble(build_staircase_2d(1, n, 1 + t % 2)), rng()); break;
        case 2:
          circ = sample_circuit(rotation_ensemble(build_brickwork_1d(n, 2), {"X", "Z"}, "ZZ", 1 + t % 3), rng());
          break;
        default: circ = random_clifford_circuit(n, depth, rng); break;
      }
      PauliSum o(n);
      for (std::size_t term = 0; term < 3; ++term) {
        PauliString p(n);
        for (std::size_t q = 0; q < n; ++q) p.set(q, static_cast<Pauli>(rng() % 4));
        o.add(p, std::uniform_real_distribution<double>(-1.0, 1.0)(rng));
      }
      const ProductState rho = random_pure_state(n, rng);
      TruncationPolicy policy;
      policy.weight_k = n;
      const double dev = std::abs(estimate_expectation(o, circ, policy, rho) - statevector_expectation(circ, o, rho));
      c.max_deviation = std::max(c.max_deviation, dev);
    }
    c.pass = c.max_deviation <= c.tolerance;
    out.push_back(c);
  }

  {
    ValidationCheck c{"ptm_agreement", true, 0.0, 1e-10, ""};
    double ortho = 0.0;
    for (std::size_t kind = 0; kind < 5; ++kind) {
      for (std::size_t t = 0; t < trials; ++t) {
        const Gate g = random_gate(kind, rng);
        const PTMatrix fast = gate_ptm(g);
        c.max_deviation = std::max(c.max_deviation, PTMatrix::max_difference(fast, ptm_reference(g)));
        ortho = std::max(ortho, fast.orthogonality_error());
      }
    }
    c.pass = c.max_deviation <= c.tolerance && ortho <= 1e-10;
    c.detail = "max orthogonality error " + format_double(ortho);
    out.push_back(c);
  }

  {
    ValidationCheck c{"transfer_rows", true, 0.0, 1e-12, ""};
    const std::vector<EnsembleSpec> specs = {
        haar_su4_ensemble(build_brickwork_1d(n, 4)),
        rotation_ensemble(build_brickwork_1d(n, 2), {"X", "Y", "Z"}, "ZZ", 2),
        rotation_ensemble(build_staircase_2d(1, n, 1), {"X"}, "XY", 1),
    };
    for (const auto& s : specs) c.max_deviation = std::max(c.max_deviation, build_transfer(s).max_row_error());
    c.pass = c.max_deviation <= c.tolerance;
    out.push_back(c);
  }

  {
    ValidationCheck c{"serial_parallel_bitwise", true, 0.0, 0.0, ""};
    std::size_t mismatches = 0;
    for (std::size_t t = 0; t < std::min<std::size_t>(trials, 20); ++t) {
      const Circuit circ = sample_circuit(haar_su4_ensemble(build_brickwork_1d(n, 6)), rng());
      TruncationPolicy policy;
      policy.weight_k = 2;
      const auto a = back_propagate(z0, circ, policy, Execution::Serial);
      const auto b = back_propagate(z0, circ, policy, Execution::Parallel);
      if (!(a.observable == b.observable)) ++mismatches;
    }
    c.max_deviation = static_cast<double>(mismatches);
    c.pass = mismatches == 0;
    c.detail = std::to_string(mismatches) + " differing results";
    out.push_back(c);
  }

  {
    ValidationCheck c{"mc_vs_exact_chain", true, 0.0, 0.0, ""};
    const EnsembleSpec spec = haar_su4_ensemble(build_brickwork_1d(n, 3));
    const ProductState rho = ProductState::zero_state(n);
    const MSEEstimate mc = mc_mse_estimate(spec, z0, rho, 1, 20000, derive_seed(seed, 1));
    const double exact = exact_chain_mse(build_transfer(spec), z0, rho, 1);
    c.max_deviation = std::abs(mc.mean - exact);
    c.tolerance = 4.0 * mc.std_error + 1e-12;
    c.pass = c.max_deviation <= c.tolerance;
    c.detail = "mc " + format_double(mc.mean) + " exact " + format_double(exact);
    out.push_back(c);
  }

  {
    ValidationCheck c{"mc_vs_empirical", true, 0.0, 0.0, ""};
    const EnsembleSpec spec = haar_su4_ensemble(build_brickwork_1d(n, 3));
    const ProductState rho = ProductState::zero_state(n);
    const MSEEstimate mc = mc_mse_estimate(spec, z0, rho, 1, 20000, derive_seed(seed, 2));
    const MSEEstimate emp = empirical_mse(spec, z0, rho, 1, trials, derive_seed(seed, 3));
    c.max_deviation = std::abs(mc.mean - emp.mean);
    c.tolerance = 3.0 * std::hypot(mc.std_error, emp.std_error) + 1e-12;
    c.pass = c.max_deviation <= c.tolerance;
    c.detail = "mc " + format_double(mc.mean) + " empirical " + format_double(emp.mean);
    out.push_back(c);
  }
  return out;
}

}  // namespace pauliprop
