#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>
#include <omp.h>

#include "pauliprop/experiment.hpp"
#include "pauliprop/numeric.hpp"
#include "pauliprop/oracle.hpp"

using namespace pauliprop;

namespace {

const char* kSmall = R"({
  "name": "small",
  "topology": {"builder": "brickwork_1d", "n": 6},
  "ensemble": {"family": "haar_su4"},
  "depths": [1, 3],
  "ks": [1, 2],
  "observable": "Z2",
  "estimators": ["propagate", "mc_mse", "empirical_mse", "trivial", "bound"],
  "samples": 4000,
  "trials": 40,
  "seed": 3,
  "timing": false
})";

std::string with(const std::string& base, const std::string& key, const std::string& value) {
  auto j = nlohmann::json::parse(base);
  j[key] = nlohmann::json::parse(value);
  return j.dump(2);
}

std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string sweep_csv(const ExperimentConfig& cfg) {
  std::ostringstream os;
  write_sweep_csv(os, cfg, run_sweep(cfg));
  return os.str();
}

}  // namespace

TEST(Config, ParsesDefaultsAndHash) {
  const auto cfg = parse_config(kSmall);
  EXPECT_EQ(cfg.name, "small");
  EXPECT_EQ(config_qubits(cfg), 6U);
  EXPECT_EQ(cfg.state, "zero");
  EXPECT_FALSE(cfg.timing);
  EXPECT_EQ(cfg.config_hash, fnv1a64(kSmall));
  EXPECT_EQ(config_ensemble(cfg, 3).depth(), 3U);
  EXPECT_EQ(config_observable(cfg).size(), 1U);
}

TEST(Config, DepthCountsRepetitionsOnStaircase) {
  auto text = with(kSmall, "topology", R"({"builder": "staircase_2d", "rows": 2, "cols": 3})");
  const auto cfg = parse_config(text);
  EXPECT_EQ(config_ensemble(cfg, 2).depth(), 10U);
  EXPECT_EQ(config_ensemble(cfg, 0).depth(), 0U);
}

TEST(Config, ErrorsNameTheField) {
  EXPECT_NE(config_error(with(kSmall, "colour", "1")).find("'colour'"), std::string::npos);
  EXPECT_NE(config_error(with(kSmall, "depths", R"(["a"])")).find("'depths[0]'"), std::string::npos);
  EXPECT_NE(config_error(with(kSmall, "ks", "[7]")).find("'ks'"), std::string::npos);
  EXPECT_NE(config_error(with(kSmall, "state", R"("mixed")")).find("'state'"), std::string::npos);
  EXPECT_NE(config_error(with(kSmall, "estimators", R"(["guess"])")).find("'estimators'"), std::string::npos);
  EXPECT_NE(config_error(with(kSmall, "observable", R"("Q1")")).find("'observable'"), std::string::npos);
  EXPECT_NE(config_error(with(kSmall, "topology", R"({"builder": "torus"})")).find("'topology.builder'"),
            std::string::npos);
  EXPECT_NE(config_error(with(kSmall, "topology", R"({"builder": "brickwork_1d", "n": 20})")).find("empirical_mse"),
            std::string::npos);
  EXPECT_NE(config_error(with(kSmall, "samples", "-4")).find("'samples'"), std::string::npos);
}

TEST(Config, SyntaxErrorReportsLine) {
  const std::string bad = "{\n  \"name\": \"x\",\n  \"depths\": [1,,2]\n}";
  EXPECT_NE(config_error(bad).find("line 3"), std::string::npos);
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Sweep, CsvIsByteIdenticalAcrossRunsAndThreads) {
  const auto cfg = parse_config(kSmall);
  omp_set_num_threads(1);
  const auto a = sweep_csv(cfg);
  omp_set_num_threads(3);
  const auto b = sweep_csv(cfg);
  omp_set_num_threads(omp_get_num_procs());
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.rfind("# pauliprop ", 0), 0U);
  EXPECT_NE(a.find("\ndepth,k,status,estimate,mse_mean,mse_stderr,bound,var_trivial,emp_mse_mean,emp_mse_stderr,"
                   "runtime_ms,peak_terms\n"),
            std::string::npos);
  EXPECT_NE(a.find("\n3,2,ok,"), std::string::npos);
}

TEST(Sweep, CellsAreConsistent) {
  const auto cfg = parse_config(kSmall);
  const auto r = run_sweep(cfg);
  ASSERT_EQ(r.rows.size(), 4U);
  EXPECT_TRUE(r.all_ok());
  for (const auto& row : r.rows) {
    ASSERT_TRUE(row.mse_mean && row.emp_mse_mean && row.bound && row.var_trivial && row.estimate);
    EXPECT_EQ(*row.runtime_ms, 0.0);
    EXPECT_LE(*row.mse_mean, *row.bound + 5 * *row.mse_stderr);
  }
  // Depth 1 with Z2 is exact at k = 1: the only layer is never truncated.
  EXPECT_EQ(*r.rows[0].mse_mean, 0.0);
}

TEST(Sweep, JsonMirrorsCsv) {
  auto text = with(kSmall, "estimators", R"(["propagate", "bound"])");
  const auto cfg = parse_config(text);
  const auto r = run_sweep(cfg);
  std::ostringstream os;
  write_sweep_json(os, cfg, r);
  const auto j = nlohmann::json::parse(os.str());
  EXPECT_EQ(j["tool"], "pauliprop");
  EXPECT_EQ(j["seed"], 3);
  ASSERT_EQ(j["rows"].size(), 4U);
  EXPECT_TRUE(j["rows"][0]["mse_mean"].is_null());
  EXPECT_TRUE(j["rows"][0]["bound"].is_number());
  EXPECT_EQ(j["rows"][3]["depth"], 3);

  std::ostringstream csv;
  write_sweep_csv(csv, cfg, r);
  EXPECT_NE(csv.str().find("\n1,1,ok,"), std::string::npos);
  EXPECT_NE(csv.str().find(",,"), std::string::npos);
}

TEST(Sweep, BudgetFailureIsReportedPerCell) {
  auto text = with(kSmall, "truncation", R"({"max_terms": 5})");
  text = with(text, "estimators", R"(["propagate"])");
  const auto r = run_sweep(parse_config(text));
  EXPECT_FALSE(r.all_ok());
  bool budget = false;
  for (const auto& row : r.rows) budget = budget || row.status.rfind("budget_exceeded_layer_", 0) == 0;
  EXPECT_TRUE(budget);
}

TEST(Weights, HistogramRowsAndHeader) {
  const auto cfg = parse_config(with(kSmall, "weights_k", "2"));
  const auto rows = run_weights(cfg);
  ASSERT_FALSE(rows.empty());
  for (const auto& w : rows) EXPECT_LE(w.weight, 6U);
  std::ostringstream os;
  write_weights_csv(os, cfg, rows);
  EXPECT_NE(os.str().find("\ndepth,weight,term_count,l2_mass\n"), std::string::npos);
}

TEST(Validation, SmallRegisterPasses) {
  for (const auto& c : run_validation(4, 10, 2)) EXPECT_TRUE(c.pass) << c.name << " " << c.detail;
  EXPECT_THROW(run_validation(15, 1, 0), OracleCapExceeded);
  EXPECT_THROW(run_validation(4, 0, 0), std::invalid_argument);
}
