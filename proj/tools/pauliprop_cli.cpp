// pauliprop: sweep, weight-histogram and validation commands.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <omp.h>

#include "pauliprop/experiment.hpp"
#include "pauliprop/numeric.hpp"

namespace fs = std::filesystem;
using namespace pauliprop;

namespace {

fs::path output_dir(const std::string& flag, const ExperimentConfig& cfg) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("PAULIPROP_OUT"); env != nullptr && *env != '\0') return env;
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  return ".";
}

template <class Fn>
void write_file(const fs::path& path, Fn&& fn) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  fn(out);
  std::cout << "wrote " << path.string() << '\n';
}

int cmd_sweep(const std::string& config, const std::string& out_flag, int threads) {
  const ExperimentConfig cfg = load_config(config);
  if (threads > 0) omp_set_num_threads(threads);
  const SweepResult r = run_sweep(cfg);
  const fs::path dir = output_dir(out_flag, cfg);
  fs::create_directories(dir);
  write_file(dir / (cfg.name + "_sweep.csv"), [&](std::ostream& os) { write_sweep_csv(os, cfg, r); });
  write_file(dir / (cfg.name + "_sweep.json"), [&](std::ostream& os) { write_sweep_json(os, cfg, r); });
  write_file(dir / (cfg.name + "_layers.csv"), [&](std::ostream& os) { write_layers_csv(os, cfg, r); });
  write_file(dir / (cfg.name + "_layers.json"), [&](std::ostream& os) { write_layers_json(os, cfg, r); });
  std::size_t failed = 0;
  for (const auto& row : r.rows) {
    if (row.status != "ok") {
      ++failed;
      std::cerr << "cell depth=" << row.depth << " k=" << row.k << ": " << row.status << '\n';
    }
  }
  std::cout << r.rows.size() - failed << "/" << r.rows.size() << " cells ok\n";
  return failed == 0 ? 0 : 1;
}

int cmd_weights(const std::string& config, const std::string& out_flag) {
  const ExperimentConfig cfg = load_config(config);
  const auto rows = run_weights(cfg);
  const fs::path dir = output_dir(out_flag, cfg);
  fs::create_directories(dir);
  write_file(dir / (cfg.name + "_weights.csv"), [&](std::ostream& os) { write_weights_csv(os, cfg, rows); });
  write_file(dir / (cfg.name + "_weights.json"), [&](std::ostream& os) { write_weights_json(os, cfg, rows); });
  return 0;
}

int cmd_validate(std::size_t n, std::size_t trials, std::uint64_t seed) {
  const auto checks = run_validation(n, trials, seed);
  bool ok = true;
  for (const auto& c : checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " max_dev=" << format_double(c.max_deviation)
              << " tol=" << format_double(c.tolerance);
    if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
    std::cout << '\n';
    ok = ok && c.pass;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-weight Pauli propagation experiments"};
  app.set_version_flag("--version", std::string("pauliprop ") + PAULIPROP_VERSION);
  app.require_subcommand(1);

  std::string config;
  std::string out;
  int threads = 0;
  auto* sweep = app.add_subcommand("sweep", "Run every (depth, k) cell of a config and write CSV/JSON");
  sweep->add_option("config", config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", out, "Output directory (default: $PAULIPROP_OUT, then the config's output_dir)");
  sweep->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  auto* weights = app.add_subcommand("weights", "Weight histogram of the back-propagated observable per depth");
  weights->add_option("config", config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  weights->add_option("--out", out, "Output directory");

  std::size_t n = 6;
  std::size_t trials = 50;
  std::uint64_t seed = 1;
  auto* validate = app.add_subcommand("validate", "Oracle cross-checks at small n");
  validate->add_option("--n", n, "Qubits")->required();
  validate->add_option("--trials", trials, "Random circuits per check")->required();
  validate->add_option("--seed", seed, "Master seed");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*sweep) return cmd_sweep(config, out, threads);
    if (*weights) return cmd_weights(config, out);
    if (*validate) return cmd_validate(n, trials, seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
