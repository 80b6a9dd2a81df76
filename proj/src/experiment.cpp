#include "wavesieve/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <thread>

#include "wavesieve/error.hpp"
#include "wavesieve/expression.hpp"
#include "wavesieve/rng.hpp"

namespace wavesieve {

double m_bivariate(double x1, double x2) {
  const double x2sq = x2 * x2;
  const double t = 2.0 * x1 - 1.0;
  return (2.0 - 3.0 * x2sq + 4.0 * x2sq * x2sq) * std::exp(-t * t);
}

double m_univariate(double x) {
  require(x >= 0.0 && x <= 1.0, "univariate regression function is defined on [0, 1]");
  if (x <= 0.7) {
    const double s = 1.7 * x;
    return 2.0 + 8.0 * x * x - s * s * s * s;
  }
  return 2.0 * (std::sqrt(4.0 * (x - 0.7)) + 1.0);
}

RegressionFunction regression_function_by_id(const std::string& id,
                                             int dimension) {
  if (id == "bivariate_paper") {
    require(dimension == 2, "bivariate_paper needs two design components");
    return [](std::span<const double> x) { return m_bivariate(x[0], x[1]); };
  }
  if (id == "univariate_paper") {
    require(dimension == 1, "univariate_paper needs one design component");
    return [](std::span<const double> x) {
      return m_univariate(std::clamp(x[0], 0.0, 1.0));
    };
  }
  if (id.rfind("expr:", 0) == 0) {
    Expression expr = Expression::parse(id.substr(5), dimension);
    return [expr](std::span<const double> x) { return expr(x); };
  }
  fail(ErrorCode::kInvalidArgument, "unknown regression function '" + id + "'");
}

GraphSource GraphSource::parse(const std::string& text) {
  GraphSource src;
  std::string body = text;
  if (auto plus = body.rfind('+'); plus != std::string::npos) {
    const std::string count = body.substr(plus + 1);
    if (!count.empty() && std::all_of(count.begin(), count.end(), ::isdigit)) {
      src.chords = std::stoull(count);
      body = body.substr(0, plus);
    }
  }
  auto bad = [&] {
    fail(ErrorCode::kParse, "cannot parse graph source '" + text + "'");
  };
  try {
    if (body.rfind("torus:", 0) == 0) {
      const std::string dims = body.substr(6);
      const auto x = dims.find('x');
      if (x == std::string::npos) bad();
      src.kind = Kind::kTorus;
      src.rows = std::stoi(dims.substr(0, x));
      src.cols = std::stoi(dims.substr(x + 1));
    } else if (body.rfind("knn:", 0) == 0) {
      const std::string args = body.substr(4);
      const auto comma = args.find(',');
      if (comma == std::string::npos) bad();
      src.kind = Kind::kKnn;
      src.points = std::stoull(args.substr(0, comma));
      src.k = std::stoull(args.substr(comma + 1));
    } else {
      src.kind = Kind::kFile;
      src.path = body.rfind("file:", 0) == 0 ? body.substr(5) : body;
      if (src.path.empty()) bad();
    }
  } catch (const std::logic_error&) {
    bad();
  }
  return src;
}

std::string GraphSource::describe() const {
  std::string out;
  switch (kind) {
    case Kind::kTorus:
      out = "torus:" + std::to_string(rows) + "x" + std::to_string(cols);
      break;
    case Kind::kKnn:
      out = "knn:" + std::to_string(points) + "," + std::to_string(k);
      break;
    case Kind::kFile:
      out = "file:" + path.string();
      break;
  }
  if (chords > 0) out += "+" + std::to_string(chords);
  return out;
}

Graph GraphSource::build() const {
  Graph g;
  switch (kind) {
    case Kind::kTorus:
      g = torus_lattice(rows, cols);
      break;
    case Kind::kKnn:
      g = knn_geometric_graph(points, k, derive_seed(seed, {0x6b6e6eULL}));
      break;
    case Kind::kFile:
      g = load_graph(path);
      break;
  }
  if (chords > 0) g = add_random_chords(g, chords, derive_seed(seed, {0xc0dULL}));
  return g;
}

void ExperimentConfig::validate() const {
  require(etas.size() >= 2, "need at least one design component and a noise component");
  require(replications >= 1, "replications must be at least 1");
  require(!levels.empty(), "levels must not be empty");
  require(!wavelets.empty(), "wavelets must not be empty");
  for (const auto& w : wavelets) filter_by_name(w);
  for (int j : levels) require(j >= 0 && j <= 12, "levels must lie in [0, 12]");
  require(test_fraction > 0.0 && test_fraction < 1.0, "test fraction must lie in (0, 1)");
  require(std::abs(copula_rho) < 1.0, "copula correlation must satisfy |rho| < 1");
  require(noise_scale >= 0.0, "noise scale must be non-negative");
  require(svd_rtol >= 0.0, "svd tolerance must be non-negative");
  require(!truncation_c || *truncation_c > 0.0, "truncation constant must be positive");
  chain.validate();
  require(chain.iterations >= 1, "chain needs at least one iteration");
  regression_function_by_id(regression_function, dimension());
}

ExperimentConfig bivariate_preset() {
  ExperimentConfig cfg;
  cfg.graph.chords = 60;
  return cfg;
}

ExperimentConfig univariate_preset() {
  ExperimentConfig cfg = bivariate_preset();
  cfg.regression_function = "univariate_paper";
  cfg.etas = {0.15, 0.15};
  cfg.noise_scale = 0.5;
  cfg.levels = {2, 3, 4, 5, 6};
  return cfg;
}

namespace {

nlohmann::json graph_source_to_json(const GraphSource& g) {
  nlohmann::json doc;
  switch (g.kind) {
    case GraphSource::Kind::kTorus:
      doc = {{"type", "torus"}, {"rows", g.rows}, {"cols", g.cols}};
      break;
    case GraphSource::Kind::kKnn:
      doc = {{"type", "knn"}, {"points", g.points}, {"k", g.k}};
      break;
    case GraphSource::Kind::kFile:
      doc = {{"type", "file"}, {"path", g.path.string()}};
      break;
  }
  doc["chords"] = g.chords;
  doc["seed"] = g.seed;
  return doc;
}

GraphSource graph_source_from_json(const nlohmann::json& doc) {
  if (doc.is_string()) return GraphSource::parse(doc.get<std::string>());
  GraphSource g;
  const std::string type = doc.value("type", "torus");
  if (type == "torus") {
    g.kind = GraphSource::Kind::kTorus;
    g.rows = doc.value("rows", 18);
    g.cols = doc.value("cols", 18);
  } else if (type == "knn") {
    g.kind = GraphSource::Kind::kKnn;
    g.points = doc.at("points").get<std::size_t>();
    g.k = doc.at("k").get<std::size_t>();
  } else if (type == "file") {
    g.kind = GraphSource::Kind::kFile;
    g.path = doc.at("path").get<std::string>();
  } else {
    fail(ErrorCode::kInvalidArgument, "unknown graph type '" + type + "'");
  }
  g.chords = doc.value("chords", std::size_t{0});
  g.seed = doc.value("seed", std::uint64_t{1});
  return g;
}

const std::map<std::string, int> kKnownKeys = {
    {"preset", 0},       {"graph", 0},          {"regression_function", 0},
    {"etas", 0},         {"copula_rho", 0},     {"copula_mode", 0},
    {"noise_scale", 0},  {"wavelets", 0},       {"levels", 0},
    {"replications", 0}, {"chain", 0},          {"test_fraction", 0},
    {"seed", 0},         {"svd_rtol", 0},       {"phi_resolution", 0},
    {"truncation_c", 0}, {"output_dir", 0},
};

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& doc) {
  require(doc.is_object(), "experiment config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (!kKnownKeys.contains(key)) {
      fail(ErrorCode::kInvalidArgument, "unknown config key '" + key + "'");
    }
  }
  try {
    const std::string preset = doc.value("preset", "bivariate_paper");
    ExperimentConfig cfg;
    if (preset == "bivariate_paper") {
      cfg = bivariate_preset();
    } else if (preset == "univariate_paper") {
      cfg = univariate_preset();
    } else {
      fail(ErrorCode::kInvalidArgument, "unknown preset '" + preset + "'");
    }
    if (doc.contains("graph")) cfg.graph = graph_source_from_json(doc["graph"]);
    cfg.regression_function = doc.value("regression_function", cfg.regression_function);
    cfg.etas = doc.value("etas", cfg.etas);
    cfg.copula_rho = doc.value("copula_rho", cfg.copula_rho);
    if (doc.contains("copula_mode")) {
      const auto mode = doc["copula_mode"].get<std::string>();
      if (mode == "innovations") {
        cfg.copula_mode = CopulaMode::kInnovations;
      } else if (mode == "final_fields") {
        cfg.copula_mode = CopulaMode::kFinalFields;
      } else {
        fail(ErrorCode::kInvalidArgument, "unknown copula_mode '" + mode + "'");
      }
    }
    cfg.noise_scale = doc.value("noise_scale", cfg.noise_scale);
    cfg.wavelets = doc.value("wavelets", cfg.wavelets);
    cfg.levels = doc.value("levels", cfg.levels);
    cfg.replications = doc.value("replications", cfg.replications);
    if (doc.contains("chain")) {
      const auto& chain = doc["chain"];
      cfg.chain.iterations = chain.value("iterations", cfg.chain.iterations);
      cfg.chain.burn_in = chain.contains("burn_in")
                              ? chain["burn_in"].get<std::size_t>()
                              : cfg.chain.iterations / 5;
    }
    cfg.test_fraction = doc.value("test_fraction", cfg.test_fraction);
    cfg.seed = doc.value("seed", cfg.seed);
    cfg.svd_rtol = doc.value("svd_rtol", cfg.svd_rtol);
    cfg.phi_resolution = doc.value("phi_resolution", cfg.phi_resolution);
    if (doc.contains("truncation_c") && !doc["truncation_c"].is_null()) {
      cfg.truncation_c = doc["truncation_c"].get<double>();
    }
    cfg.output_dir = doc.value("output_dir", cfg.output_dir.string());
    cfg.validate();
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParse, std::string("malformed experiment config: ") + e.what());
  }
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  return {
      {"graph", graph_source_to_json(cfg.graph)},
      {"regression_function", cfg.regression_function},
      {"etas", cfg.etas},
      {"copula_rho", cfg.copula_rho},
      {"copula_mode", cfg.copula_mode == CopulaMode::kInnovations ? "innovations"
                                                                  : "final_fields"},
      {"noise_scale", cfg.noise_scale},
      {"wavelets", cfg.wavelets},
      {"levels", cfg.levels},
      {"replications", cfg.replications},
      {"chain", {{"iterations", cfg.chain.iterations}, {"burn_in", cfg.chain.burn_in}}},
      {"test_fraction", cfg.test_fraction},
      {"seed", cfg.seed},
      {"svd_rtol", cfg.svd_rtol},
      {"phi_resolution", cfg.phi_resolution},
      {"truncation_c", cfg.truncation_c ? nlohmann::json(*cfg.truncation_c)
                                        : nlohmann::json(nullptr)},
      {"output_dir", cfg.output_dir.string()},
  };
}

std::pair<double, double> mean_and_sd(const std::vector<double>& values) {
  if (values.empty()) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

namespace {

// Everything shared read-only by the replications.
struct Setup {
  std::shared_ptr<const Graph> graph;
  ConcliquePartition partition;
  EtaRange range;
  std::vector<GmrfSpec> specs;  // one per component
  std::map<std::string, PhiTable> tables;
  std::map<std::string, ScalingFilter> filters;
  RegressionFunction m;
  int d = 1;
};

struct FieldData {
  Dataset data;
  bool learn_connected = false;
};

// Seed streams within a replication.
enum Stream : std::uint64_t {
  kCoupledChain = 1,
  kSplit = 2,
  kReference = 3,
  kComponentBase = 100,
};

Dataset make_dataset(const Setup& setup, const ExperimentConfig& cfg,
                     const std::vector<std::vector<double>>& design_normals,
                     const std::vector<double>& noise) {
  const auto n = static_cast<Eigen::Index>(noise.size());
  Dataset data;
  data.x.resize(n, setup.d);
  data.y.resize(n);
  std::vector<double> point(static_cast<std::size_t>(setup.d));
  for (Eigen::Index s = 0; s < n; ++s) {
    for (int i = 0; i < setup.d; ++i) {
      point[i] = normal_cdf(design_normals[i][static_cast<std::size_t>(s)]);
      data.x(s, i) = point[i];
    }
    data.y[s] = setup.m(point) + cfg.noise_scale * noise[static_cast<std::size_t>(s)];
  }
  return data;
}

Dataset simulate_field(const Setup& setup, const ExperimentConfig& cfg,
                       std::uint64_t rep_seed) {
  const int d = setup.d;
  std::vector<std::vector<double>> comps(static_cast<std::size_t>(d) + 1);
  const bool coupled = d >= 2 && cfg.copula_mode == CopulaMode::kInnovations;
  auto chain_cfg = [&](std::uint64_t stream) {
    ChainConfig c = cfg.chain;
    c.thin = 0;
    c.seed = derive_seed(rep_seed, {stream});
    return c;
  };
  std::size_t first_single = 0;
  if (coupled) {
    auto [a, b] = gibbs_chain_coupled(setup.specs[0], setup.specs[1], setup.partition,
                                      chain_cfg(kCoupledChain), cfg.copula_rho);
    comps[0] = std::move(a.final_state.values);
    comps[1] = std::move(b.final_state.values);
    first_single = 2;
  }
  for (std::size_t i = first_single; i < comps.size(); ++i) {
    comps[i] = gibbs_chain(setup.specs[i], setup.partition,
                           chain_cfg(kComponentBase + i))
                   .final_state.values;
  }
  if (d >= 2 && cfg.copula_mode == CopulaMode::kFinalFields) {
    couple_fields(comps[0], comps[1], cfg.copula_rho);
  }
  std::vector<double> noise = std::move(comps.back());
  comps.pop_back();
  return make_dataset(setup, cfg, comps, noise);
}

// Same marginal design law with the copula, but independent across sites.
Dataset simulate_reference(const Setup& setup, const ExperimentConfig& cfg,
                           std::uint64_t rep_seed) {
  const std::size_t n = setup.graph->node_count();
  Rng rng(derive_seed(rep_seed, {kReference}));
  const double rho_c = std::sqrt(1.0 - cfg.copula_rho * cfg.copula_rho);
  std::vector<std::vector<double>> comps(static_cast<std::size_t>(setup.d),
                                         std::vector<double>(n));
  std::vector<double> noise(n);
  for (std::size_t s = 0; s < n; ++s) {
    for (int i = 0; i < setup.d; ++i) comps[i][s] = rng.normal();
    if (setup.d >= 2) comps[1][s] = cfg.copula_rho * comps[0][s] + rho_c * comps[1][s];
    noise[s] = rng.normal();
  }
  return make_dataset(setup, cfg, comps, noise);
}

std::vector<double> evaluate_all(const Setup& setup, const ExperimentConfig& cfg,
                                 const Dataset& learn, const Dataset& test) {
  const double rho = cfg.truncation_c
                         ? default_rho(static_cast<double>(learn.size()), *cfg.truncation_c)
                         : auto_rho(learn.y);
  std::vector<double> out;
  for (const auto& name : cfg.wavelets) {
    const ScalingFilter& filter = setup.filters.at(name);
    const PhiTable& table = setup.tables.at(name);
    for (int j : cfg.levels) {
      const WaveletSieve sieve = make_sieve_on_unit_cube(filter, setup.d, j);
      const RegressionFit f = fit(learn, sieve, table, rho, cfg.svd_rtol);
      out.push_back(l2_error_mc(f, table, setup.m, test.x));
    }
  }
  return out;
}

ReplicationRecord run_replication(const Setup& setup, const ExperimentConfig& cfg,
                                  std::size_t index) {
  ReplicationRecord rec;
  rec.index = index;
  try {
    const std::uint64_t rep_seed = derive_seed(cfg.seed, {index});
    const Split split =
        connected_split(*setup.graph, cfg.test_fraction, derive_seed(rep_seed, {kSplit}));
    rec.learn_connected = split.learn_connected;

    const Dataset field = simulate_field(setup, cfg, rep_seed);
    rec.field_l2 = evaluate_all(setup, cfg, field.subset(split.learn),
                                field.subset(split.test));
    const Dataset reference = simulate_reference(setup, cfg, rep_seed);
    rec.ref_l2 = evaluate_all(setup, cfg, reference.subset(split.learn),
                              reference.subset(split.test));
    rec.ok = true;
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
    rec.field_l2.clear();
    rec.ref_l2.clear();
  }
  return rec;
}

unsigned thread_count(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("WAVESIEVE_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) return static_cast<unsigned>(parsed);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, unsigned threads) {
  cfg.validate();
  Setup setup;
  setup.d = cfg.dimension();
  setup.graph = std::make_shared<const Graph>(cfg.graph.build());
  require(setup.graph->edge_count() >= 1, "experiment graph has no edges");
  setup.partition = concliques(*setup.graph);
  setup.range = eta_range(*setup.graph);
  for (double eta : cfg.etas) {
    setup.specs.push_back(make_gmrf_spec(setup.graph, eta, setup.range));
  }
  for (const auto& name : cfg.wavelets) {
    ScalingFilter filter = filter_by_name(name);
    setup.tables.emplace(name, cascade(filter, cfg.phi_resolution));
    setup.filters.emplace(name, std::move(filter));
  }
  setup.m = regression_function_by_id(cfg.regression_function, setup.d);

  ExperimentResult result;
  result.node_count = setup.graph->node_count();
  result.edge_count = setup.graph->edge_count();
  result.conclique_count = setup.partition.classes.size();
  result.eta_range = setup.range;
  for (const auto& spec : setup.specs) {
    const Eigen::MatrixXd a = gmrf_covariance(spec);
    result.max_symmetry_residual = std::max(
        result.max_symmetry_residual, (a - a.transpose()).cwiseAbs().maxCoeff());
  }

  result.replications.resize(cfg.replications);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cfg.replications; i = next++) {
      result.replications[i] = run_replication(setup, cfg, i);
    }
  };
  const unsigned n_threads =
      std::min<unsigned>(thread_count(threads), static_cast<unsigned>(cfg.replications));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::size_t row = 0;
  for (const auto& name : cfg.wavelets) {
    for (int j : cfg.levels) {
      std::vector<double> field, ref;
      for (const auto& rec : result.replications) {
        if (!rec.ok) continue;
        field.push_back(rec.field_l2[row]);
        ref.push_back(rec.ref_l2[row]);
      }
      ResultRow r;
      r.wavelet = name;
      r.j = j;
      std::tie(r.mean_l2, r.sd_l2) = mean_and_sd(field);
      std::tie(r.ref_mean_l2, r.ref_sd_l2) = mean_and_sd(ref);
      r.n_reps = field.size();
      result.table.rows.push_back(r);
      ++row;
    }
  }
  return result;
}

namespace {

std::string format_number(double v) {
  std::ostringstream out;
  out << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return out.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace

std::string table_csv(const ResultTable& table) {
  std::string out = "wavelet,j,mean_l2,sd_l2,ref_mean_l2,ref_sd_l2,n_reps\n";
  for (const auto& r : table.rows) {
    out += r.wavelet + "," + std::to_string(r.j) + "," + format_number(r.mean_l2) +
           "," + format_number(r.sd_l2) + "," + format_number(r.ref_mean_l2) +
           "," + format_number(r.ref_sd_l2) + "," + std::to_string(r.n_reps) + "\n";
  }
  return out;
}

nlohmann::json table_to_json(const ResultTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table.rows) {
    rows.push_back({{"wavelet", r.wavelet},
                    {"j", r.j},
                    {"mean_l2", r.mean_l2},
                    {"sd_l2", r.sd_l2},
                    {"ref_mean_l2", r.ref_mean_l2},
                    {"ref_sd_l2", r.ref_sd_l2},
                    {"n_reps", r.n_reps},
                    {"reference_better", r.ref_mean_l2 < r.mean_l2}});
  }
  return rows;
}

ResultTable table_from_json(const nlohmann::json& doc) {
  const auto& rows = doc.is_object() ? doc.at("rows") : doc;
  ResultTable table;
  try {
    for (const auto& item : rows) {
      ResultRow r;
      r.wavelet = item.at("wavelet").get<std::string>();
      r.j = item.at("j").get<int>();
      r.mean_l2 = item.at("mean_l2").get<double>();
      r.sd_l2 = item.at("sd_l2").get<double>();
      r.ref_mean_l2 = item.at("ref_mean_l2").get<double>();
      r.ref_sd_l2 = item.at("ref_sd_l2").get<double>();
      r.n_reps = item.at("n_reps").get<std::size_t>();
      table.rows.push_back(r);
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParse, std::string("malformed result table: ") + e.what());
  }
  return table;
}

std::string table_text(const ResultTable& table) {
  std::vector<std::string> wavelets;
  std::vector<int> levels;
  for (const auto& r : table.rows) {
    if (std::find(wavelets.begin(), wavelets.end(), r.wavelet) == wavelets.end()) {
      wavelets.push_back(r.wavelet);
    }
    if (std::find(levels.begin(), levels.end(), r.j) == levels.end()) {
      levels.push_back(r.j);
    }
  }
  auto find = [&](const std::string& w, int j) -> const ResultRow* {
    for (const auto& r : table.rows) {
      if (r.wavelet == w && r.j == j) return &r;
    }
    return nullptr;
  };
  std::ostringstream out;
  out << std::fixed << std::setprecision(3);
  out << std::setw(4) << "j";
  for (const auto& w : wavelets) out << std::setw(12) << w;
  for (const auto& w : wavelets) out << std::setw(12) << (w + " ref");
  out << '\n';
  for (int j : levels) {
    out << std::setw(4) << j;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& w : wavelets) {
        const ResultRow* r = find(w, j);
        out << std::setw(12) << (r ? (pass == 0 ? r->mean_l2 : r->ref_mean_l2) : NAN);
      }
    }
    out << '\n' << std::setw(4) << "";
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& w : wavelets) {
        const ResultRow* r = find(w, j);
        std::ostringstream cell;
        cell << std::fixed << std::setprecision(3) << '('
             << (r ? (pass == 0 ? r->sd_l2 : r->ref_sd_l2) : NAN) << ')';
        out << std::setw(12) << cell.str();
      }
    }
    out << '\n';
  }
  return out.str();
}

nlohmann::json results_json(const ExperimentResult& result,
                            const ExperimentConfig& cfg) {
  std::size_t completed = 0;
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& rec : result.replications) {
    if (rec.ok) {
      ++completed;
    } else {
      failures.push_back({{"replication", rec.index}, {"error", rec.error}});
    }
  }
  nlohmann::json doc = {
      {"config", config_to_json(cfg)},
      {"seed", cfg.seed},
      {"graph",
       {{"source", cfg.graph.describe()},
        {"nodes", result.node_count},
        {"edges", result.edge_count},
        {"concliques", result.conclique_count},
        {"eta_range", {result.eta_range.lo, result.eta_range.hi}},
        {"max_symmetry_residual", result.max_symmetry_residual}}},
      {"replications_requested", cfg.replications},
      {"replications_completed", completed},
      {"failures", failures},
      {"rows", table_to_json(result.table)},
  };
  // Sign of field minus reference mean per row: +1 when the reference fits
  // better. Reported only.
  nlohmann::json comparison = nlohmann::json::array();
  for (const auto& r : result.table.rows) {
    const double diff = r.mean_l2 - r.ref_mean_l2;
    comparison.push_back({{"wavelet", r.wavelet},
                          {"j", r.j},
                          {"field_minus_reference", diff},
                          {"sign", diff > 0 ? 1 : (diff < 0 ? -1 : 0)}});
  }
  doc["reference_comparison"] = comparison;
  return doc;
}

void emit_table(const ExperimentResult& result, const ExperimentConfig& cfg,
                const std::filesystem::path& dir) {
  require(!result.table.rows.empty(), "result table is empty");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create output directory " + dir.string());

  write_text(dir / "results.csv", table_csv(result.table));
  write_text(dir / "results.txt", table_text(result.table));

  const nlohmann::json doc = results_json(result, cfg);
  write_text(dir / "results.json", doc.dump(2) + "\n");

  std::string log = "replication,status,learn_connected,wavelet,j,field_l2,ref_l2,error\n";
  for (const auto& rec : result.replications) {
    if (!rec.ok) {
      std::string cause = rec.error;
      std::replace(cause.begin(), cause.end(), ',', ';');
      std::replace(cause.begin(), cause.end(), '\n', ' ');
      log += std::to_string(rec.index) + ",failed,,,,,," + cause + "\n";
      continue;
    }
    for (std::size_t r = 0; r < result.table.rows.size(); ++r) {
      const auto& row = result.table.rows[r];
      log += std::to_string(rec.index) + ",ok," + (rec.learn_connected ? "1" : "0") +
             "," + row.wavelet + "," + std::to_string(row.j) + "," +
             format_number(rec.field_l2[r]) + "," + format_number(rec.ref_l2[r]) + ",\n";
    }
  }
  write_text(dir / "replications.csv", log);
}

}  // namespace wavesieve
