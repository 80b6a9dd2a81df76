#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "wavesieve/error.hpp"
#include "wavesieve/experiment.hpp"
#include "wavesieve/expression.hpp"

using namespace wavesieve;

namespace {

ExperimentConfig smoke_config() {
  ExperimentConfig cfg = bivariate_preset();
  cfg.graph = GraphSource::parse("torus:6x6");
  cfg.wavelets = {"haar"};
  cfg.levels = {0};
  cfg.replications = 1;
  cfg.chain = ChainConfig{100, 20, 1, 0};
  return cfg;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path fresh_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("wavesieve_exp_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST(RegressionFunctions, Bivariate) {
  EXPECT_DOUBLE_EQ(m_bivariate(0.5, 0.0), 2.0);
  EXPECT_DOUBLE_EQ(m_bivariate(0.5, 1.0), 3.0);
  EXPECT_NEAR(m_bivariate(1.0, 0.0), 2.0 * std::exp(-1.0), 1e-15);
  EXPECT_NEAR(m_bivariate(1.0, 0.0), 0.73576, 1e-5);
}

TEST(RegressionFunctions, Univariate) {
  EXPECT_DOUBLE_EQ(m_univariate(0.0), 2.0);
  EXPECT_NEAR(m_univariate(0.7), 2.0 + 8.0 * 0.49 - std::pow(1.19, 4), 1e-12);
  EXPECT_NEAR(m_univariate(0.7), 3.91466, 1e-5);
  EXPECT_NEAR(m_univariate(0.95), 4.0, 1e-12);
  EXPECT_LT(m_univariate(0.7000001) - m_univariate(0.7), -1.5);
  EXPECT_THROW(m_univariate(-0.1), Error);
  EXPECT_THROW(m_univariate(1.1), Error);
}

TEST(RegressionFunctions, ById) {
  std::vector<double> p{0.5, 1.0};
  EXPECT_DOUBLE_EQ(regression_function_by_id("bivariate_paper", 2)(p), 3.0);
  EXPECT_DOUBLE_EQ(regression_function_by_id("expr:x1 + 2*x2", 2)(p), 2.5);
  std::vector<double> q{0.95};
  EXPECT_NEAR(regression_function_by_id("univariate_paper", 1)(q), 4.0, 1e-12);
  EXPECT_THROW(regression_function_by_id("bivariate_paper", 1), Error);
  EXPECT_THROW(regression_function_by_id("nope", 1), Error);
}

TEST(Expression, Grammar) {
  std::vector<double> x{0.25, 2.0};
  auto eval = [&](const std::string& text) { return Expression::parse(text, 2)(x); };
  EXPECT_DOUBLE_EQ(eval("1 + 2 * 3"), 7.0);
  EXPECT_DOUBLE_EQ(eval("(1 + 2) * 3"), 9.0);
  EXPECT_DOUBLE_EQ(eval("2 ^ 3 ^ 2"), 512.0);
  EXPECT_DOUBLE_EQ(eval("-x2 ^ 2"), -4.0);
  EXPECT_DOUBLE_EQ(eval("x"), 0.25);
  EXPECT_DOUBLE_EQ(eval("x1 * x2"), 0.5);
  EXPECT_DOUBLE_EQ(eval("x1 <= 0.25"), 1.0);
  EXPECT_DOUBLE_EQ(eval("x1 > 0.25"), 0.0);
  EXPECT_NEAR(eval("sin(pi * x2) + exp(0) + log(e)"), 2.0, 1e-15);
  EXPECT_DOUBLE_EQ(eval("sqrt(abs(-16)) / 2"), 2.0);
  EXPECT_DOUBLE_EQ(eval("1e-3 * 1000"), 1.0);
}

TEST(Expression, Errors) {
  EXPECT_THROW(Expression::parse("x3", 2), Error);
  EXPECT_THROW(Expression::parse("1 +", 1), Error);
  EXPECT_THROW(Expression::parse("foo(1)", 1), Error);
  EXPECT_THROW(Expression::parse("(1", 1), Error);
  EXPECT_THROW(Expression::parse("1 2", 1), Error);
}

TEST(GraphSource, Parse) {
  GraphSource t = GraphSource::parse("torus:18x18+60");
  EXPECT_EQ(t.kind, GraphSource::Kind::kTorus);
  EXPECT_EQ(t.rows, 18);
  EXPECT_EQ(t.chords, 60u);
  EXPECT_EQ(t.describe(), "torus:18x18+60");
  GraphSource k = GraphSource::parse("knn:50,4");
  EXPECT_EQ(k.kind, GraphSource::Kind::kKnn);
  EXPECT_EQ(k.points, 50u);
  EXPECT_EQ(k.k, 4u);
  GraphSource f = GraphSource::parse("file:/tmp/g.txt");
  EXPECT_EQ(f.kind, GraphSource::Kind::kFile);
  EXPECT_EQ(f.path, "/tmp/g.txt");
  EXPECT_THROW(GraphSource::parse("torus:18"), Error);
  EXPECT_THROW(GraphSource::parse("knn:a,b"), Error);
}

TEST(GraphSource, BuildWithChords) {
  Graph g = GraphSource::parse("torus:18x18+60").build();
  EXPECT_EQ(g.node_count(), 324u);
  EXPECT_EQ(g.edge_count(), 648u + 60u);
}

TEST(Config, JsonRoundTrip) {
  ExperimentConfig cfg = univariate_preset();
  cfg.seed = 42;
  cfg.truncation_c = 1.5;
  cfg.copula_mode = CopulaMode::kFinalFields;
  ExperimentConfig back = config_from_json(config_to_json(cfg));
  EXPECT_EQ(config_to_json(back), config_to_json(cfg));
}

TEST(Config, PresetAndOverrides) {
  ExperimentConfig cfg = config_from_json(nlohmann::json::parse(R"({
    "preset": "univariate_paper",
    "graph": "torus:8x8",
    "levels": [1, 2],
    "chain": {"iterations": 500}
  })"));
  EXPECT_EQ(cfg.regression_function, "univariate_paper");
  EXPECT_EQ(cfg.etas, (std::vector<double>{0.15, 0.15}));
  EXPECT_DOUBLE_EQ(cfg.noise_scale, 0.5);
  EXPECT_EQ(cfg.levels, (std::vector<int>{1, 2}));
  EXPECT_EQ(cfg.chain.burn_in, 100u);
  EXPECT_EQ(cfg.graph.rows, 8);
}

TEST(Config, Rejections) {
  EXPECT_THROW(config_from_json(nlohmann::json{{"bogus", 1}}), Error);
  EXPECT_THROW(config_from_json(nlohmann::json{{"replications", 0}}), Error);
  EXPECT_THROW(config_from_json(nlohmann::json{{"levels", nlohmann::json::array()}}), Error);
  EXPECT_THROW(config_from_json(nlohmann::json{{"wavelets", {"sym4"}}}), Error);
  EXPECT_THROW(config_from_json(nlohmann::json{{"copula_rho", 1.0}}), Error);
  EXPECT_THROW(config_from_json(nlohmann::json{{"preset", "other"}}), Error);
  EXPECT_THROW(config_from_json(nlohmann::json{{"etas", "x"}}), Error);
}

TEST(RunExperiment, SmokeContract) {
  ExperimentResult r = run_experiment(smoke_config(), 1);
  ASSERT_EQ(r.table.rows.size(), 1u);
  const ResultRow& row = r.table.rows[0];
  EXPECT_EQ(row.wavelet, "haar");
  EXPECT_EQ(row.j, 0);
  EXPECT_EQ(row.n_reps, 1u);
  for (double v : {row.mean_l2, row.sd_l2, row.ref_mean_l2, row.ref_sd_l2}) {
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_GE(v, 0.0);
  }
  EXPECT_EQ(r.node_count, 36u);
  EXPECT_EQ(r.conclique_count, 2u);
}

TEST(RunExperiment, RejectsEtaOutsideRange) {
  ExperimentConfig cfg = smoke_config();
  cfg.etas = {0.3, 0.1, 0.1};
  EXPECT_THROW(run_experiment(cfg, 1), Error);
}

TEST(RunExperiment, DeterministicAcrossThreadCounts) {
  ExperimentConfig cfg = smoke_config();
  cfg.replications = 4;
  cfg.wavelets = {"haar", "d4"};
  cfg.levels = {0, 1};
  const std::string one = table_csv(run_experiment(cfg, 1).table);
  const std::string again = table_csv(run_experiment(cfg, 1).table);
  const std::string three = table_csv(run_experiment(cfg, 3).table);
  EXPECT_EQ(one, again);
  EXPECT_EQ(one, three);
  cfg.seed = 2;
  EXPECT_NE(one, table_csv(run_experiment(cfg, 1).table));
}

TEST(RunExperiment, UnivariateAndFinalFieldMode) {
  ExperimentConfig uni = univariate_preset();
  uni.graph = GraphSource::parse("torus:8x8");
  uni.levels = {1, 2};
  uni.replications = 2;
  uni.chain = ChainConfig{200, 40, 1, 0};
  ExperimentResult r = run_experiment(uni, 1);
  EXPECT_EQ(r.table.rows.size(), 4u);
  for (const auto& row : r.table.rows) EXPECT_EQ(row.n_reps, 2u);

  ExperimentConfig bi = smoke_config();
  bi.copula_mode = CopulaMode::kFinalFields;
  bi.replications = 2;
  EXPECT_EQ(run_experiment(bi, 1).table.rows[0].n_reps, 2u);
}

TEST(RunExperiment, FailedReplicationsAreCountedNotFatal) {
  ExperimentConfig cfg = smoke_config();
  // log of a negative number gives non-finite responses.
  cfg.regression_function = "expr:log(x1 - 2)";
  cfg.replications = 2;
  ExperimentResult r = run_experiment(cfg, 1);
  ASSERT_EQ(r.table.rows.size(), 1u);
  EXPECT_EQ(r.table.rows[0].n_reps, 0u);
  EXPECT_TRUE(std::isnan(r.table.rows[0].mean_l2));
  ASSERT_EQ(r.replications.size(), 2u);
  EXPECT_FALSE(r.replications[0].ok);
  EXPECT_FALSE(r.replications[0].error.empty());
}

TEST(EmitTable, FilesAndRoundTrip) {
  ExperimentConfig cfg = smoke_config();
  ExperimentResult r = run_experiment(cfg, 1);
  auto dir = fresh_dir("emit");
  emit_table(r, cfg, dir);
  const std::string csv = slurp(dir / "results.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "wavelet,j,mean_l2,sd_l2,ref_mean_l2,ref_sd_l2,n_reps");
  nlohmann::json doc = nlohmann::json::parse(slurp(dir / "results.json"));
  EXPECT_EQ(doc["seed"], cfg.seed);
  EXPECT_EQ(doc["config"], config_to_json(cfg));
  ASSERT_EQ(doc["reference_comparison"].size(), 1u);
  const auto& cmp = doc["reference_comparison"][0];
  const double diff = r.table.rows[0].mean_l2 - r.table.rows[0].ref_mean_l2;
  EXPECT_EQ(cmp["sign"].get<int>(), diff > 0 ? 1 : (diff < 0 ? -1 : 0));
  ResultTable back = table_from_json(doc);
  EXPECT_EQ(table_csv(back), csv);
  EXPECT_TRUE(std::filesystem::exists(dir / "results.txt"));
  EXPECT_TRUE(std::filesystem::exists(dir / "replications.csv"));
}

TEST(EmitTable, RejectsEmptyAndUnwritable) {
  ExperimentConfig cfg = smoke_config();
  ExperimentResult empty;
  EXPECT_THROW(emit_table(empty, cfg, fresh_dir("empty")), Error);
  ExperimentResult r = run_experiment(cfg, 1);
  EXPECT_THROW(emit_table(r, cfg, "/proc/wavesieve/out"), Error);
}

TEST(TableText, ParenthesizedSd) {
  ResultTable t;
  t.rows.push_back({"d4", 2, 0.122, 0.009, 0.119, 0.009, 50});
  const std::string text = table_text(t);
  EXPECT_NE(text.find("0.122"), std::string::npos);
  EXPECT_NE(text.find("(0.009)"), std::string::npos);
}

TEST(MeanAndSd, SampleStatistics) {
  auto [m, s] = mean_and_sd({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(m, 2.5);
  EXPECT_NEAR(s, std::sqrt(5.0 / 3.0), 1e-15);
  auto [m1, s1] = mean_and_sd({7.0});
  EXPECT_DOUBLE_EQ(m1, 7.0);
  EXPECT_DOUBLE_EQ(s1, 0.0);
}
