#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "pauliprop/ensemble.hpp"
#include "pauliprop/pauli_sum.hpp"
#include "pauliprop/propagation.hpp"

namespace pauliprop {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TopologyConfig {
  std::string builder;  ///< staircase_2d | brickwork_1d | heavyhex127 | edges_file
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t n = 0;  ///< brickwork_1d only
  std::string path;   ///< edges_file only
  std::size_t induced_qubits = 0;  ///< heavyhex127 / edges_file: keep qubits [0, n)
};

struct EnsembleConfig {
  std::string family;  ///< haar_su4 | rotations
  std::vector<std::string> single_qubit;
  std::string two_qubit;
  AngleCorrelation angles = AngleCorrelation::IndependentUniform;
  std::vector<double> fixed_angles;
};

struct ExperimentConfig {
  std::string name;
  TopologyConfig topology;
  EnsembleConfig ensemble;
  std::vector<std::size_t> depths;
  std::vector<std::size_t> ks;
  std::string observable;
  std::string state = "zero";
  std::set<std::string> estimators;
  std::uint64_t samples = 10000;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  std::string output_dir;
  double coeff_eps = 0.0;
  std::size_t max_terms = 0;
  bool per_gate = false;
  /// false writes 0 into every timing column so reruns are byte-identical.
  bool timing = true;
  std::optional<std::size_t> weights_k;

  std::uint64_t config_hash = 0;  ///< fnv1a64 of the config text
};

/// Parses and validates a JSON config. Errors name the offending field or the
/// line of a syntax error.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

std::size_t config_qubits(const ExperimentConfig& cfg);
/// Depth means layers for brickwork_1d and repetitions otherwise.
EnsembleSpec config_ensemble(const ExperimentConfig& cfg, std::size_t depth);
PauliSum config_observable(const ExperimentConfig& cfg);
ProductState config_state(const ExperimentConfig& cfg);

struct SweepRow {
  std::size_t depth = 0;
  std::size_t k = 0;
  std::string status = "ok";
  std::optional<double> estimate;
  std::optional<double> mse_mean;
  std::optional<double> mse_stderr;
  std::optional<double> bound;
  std::optional<double> var_trivial;
  std::optional<double> emp_mse_mean;
  std::optional<double> emp_mse_stderr;
  std::optional<double> runtime_ms;
  std::optional<std::size_t> peak_terms;
};

struct LayerRow {
  std::size_t depth = 0;
  std::size_t k = 0;
  LayerStats stats;
};

struct SweepResult {
  std::vector<SweepRow> rows;  ///< (depth, k) order
  std::vector<LayerRow> layers;
  bool all_ok() const;
};

SweepResult run_sweep(const ExperimentConfig& cfg);

struct WeightRow {
  std::size_t depth = 0;
  std::size_t weight = 0;
  std::size_t term_count = 0;
  double l2_mass = 0.0;
};

std::vector<WeightRow> run_weights(const ExperimentConfig& cfg);

/// "# pauliprop <version> config_hash=<hex> seed=<seed>"
std::string csv_header_comment(const ExperimentConfig& cfg);
void write_sweep_csv(std::ostream& os, const ExperimentConfig& cfg, const SweepResult& r);
void write_sweep_json(std::ostream& os, const ExperimentConfig& cfg, const SweepResult& r);
void write_layers_csv(std::ostream& os, const ExperimentConfig& cfg, const SweepResult& r);
void write_layers_json(std::ostream& os, const ExperimentConfig& cfg, const SweepResult& r);
void write_weights_csv(std::ostream& os, const ExperimentConfig& cfg, const std::vector<WeightRow>& rows);
void write_weights_json(std::ostream& os, const ExperimentConfig& cfg, const std::vector<WeightRow>& rows);

struct ValidationCheck {
  std::string name;
  bool pass = false;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

/// Oracle cross-checks on n qubits: exactness at k = n, PTM agreement,
/// transfer-row sums, serial/parallel agreement and estimator consistency.
std::vector<ValidationCheck> run_validation(std::size_t n, std::size_t trials, std::uint64_t seed);

}  // namespace pauliprop
