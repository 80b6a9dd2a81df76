#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wavesieve/gmrf.hpp"
#include "wavesieve/graph.hpp"
#include "wavesieve/regression.hpp"

namespace wavesieve {

// (2 - 3 x2^2 + 4 x2^4) exp(-(2 x1 - 1)^2)
double m_bivariate(double x1, double x2);
// (2 + 8x^2 - (1.7x)^4) on [0, 0.7], 2 (sqrt(4(x - 0.7)) + 1) on (0.7, 1].
double m_univariate(double x);

// "bivariate_paper", "univariate_paper" or "expr:<expression over x1..xd>".
RegressionFunction regression_function_by_id(const std::string& id,
                                             int dimension);

struct GraphSource {
  enum class Kind { kTorus, kKnn, kFile };
  Kind kind = Kind::kTorus;
  int rows = 18;
  int cols = 18;
  std::size_t points = 0;
  std::size_t k = 0;
  std::filesystem::path path;
  std::size_t chords = 0;
  std::uint64_t seed = 1;  // knn placement and chord selection

  // "torus:RxC", "knn:P,K", "file:PATH" (or a bare path), each optionally
  // followed by "+N" for N random chords.
  static GraphSource parse(const std::string& text);
  std::string describe() const;
  Graph build() const;
};

enum class CopulaMode { kInnovations, kFinalFields };

struct ExperimentConfig {
  GraphSource graph;
  std::string regression_function = "bivariate_paper";
  // Design components first, the noise component last.
  std::vector<double> etas{0.12, -0.18, 0.12};
  double copula_rho = 0.7;
  CopulaMode copula_mode = CopulaMode::kInnovations;
  double noise_scale = 1.0;
  std::vector<std::string> wavelets{"d4", "haar"};
  std::vector<int> levels{1, 2, 3, 4};
  std::size_t replications = 50;
  ChainConfig chain{3000, 600, 1, 0};
  double test_fraction = 0.3;
  std::uint64_t seed = 1;
  double svd_rtol = kDefaultSvdRtol;
  int phi_resolution = kDefaultPhiResolution;
  std::optional<double> truncation_c;  // auto_rho when empty
  std::filesystem::path output_dir = "results";

  int dimension() const { return static_cast<int>(etas.size()) - 1; }
  void validate() const;
};

// 18x18 torus with 60 random chords, three components, D4 and Haar at
// levels 1..4.
ExperimentConfig bivariate_preset();
// Same graph, one design component with eta 0.15, noise scale 0.5, levels
// 2..6.
ExperimentConfig univariate_preset();

// Keys mirror the struct fields; "preset" selects the starting point
// ("bivariate_paper" by default) before other keys are applied.
ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

struct ResultRow {
  std::string wavelet;
  int j = 0;
  double mean_l2 = 0.0;
  double sd_l2 = 0.0;
  double ref_mean_l2 = 0.0;
  double ref_sd_l2 = 0.0;
  std::size_t n_reps = 0;
};

struct ResultTable {
  std::vector<ResultRow> rows;
};

struct ReplicationRecord {
  std::size_t index = 0;
  bool ok = false;
  std::string error;
  bool learn_connected = false;
  std::vector<double> field_l2;  // aligned with ResultTable::rows
  std::vector<double> ref_l2;
};

struct ExperimentResult {
  ResultTable table;
  std::vector<ReplicationRecord> replications;
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  std::size_t conclique_count = 0;
  EtaRange eta_range;
  double max_symmetry_residual = 0.0;
};

// Threads come from WAVESIEVE_THREADS when `threads` is 0. Results do not
// depend on the thread count.
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                unsigned threads = 0);

// Config echo, graph summary, failures and the result rows.
nlohmann::json results_json(const ExperimentResult& result,
                            const ExperimentConfig& cfg);

// Writes results.csv, results.json, results.txt and replications.csv.
void emit_table(const ExperimentResult& result, const ExperimentConfig& cfg,
                const std::filesystem::path& dir);

std::string table_csv(const ResultTable& table);
nlohmann::json table_to_json(const ResultTable& table);
ResultTable table_from_json(const nlohmann::json& doc);
// Two lines per level: means, then standard deviations in parentheses.
std::string table_text(const ResultTable& table);

// Sample mean and (n - 1)-normalized standard deviation.
std::pair<double, double> mean_and_sd(const std::vector<double>& values);

}  // namespace wavesieve
