#include "wavesieve/wavesieve.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "wavesieve/error.hpp"
#include "wavesieve/experiment.hpp"
#include "wavesieve/gmrf.hpp"
#include "wavesieve/graph.hpp"
#include "wavesieve/regression.hpp"
#include "wavesieve/theory.hpp"
#include "wavesieve/wavelet.hpp"

struct ws_graph {
  std::shared_ptr<const wavesieve::Graph> graph;
};

struct ws_phi_table {
  wavesieve::PhiTable table;
};

struct ws_fit {
  wavesieve::RegressionFit fit;
  wavesieve::PhiTable table;
};

namespace {

using namespace wavesieve;

thread_local std::string g_last_error;

ws_status set_error(ws_status status, const std::string& what) {
  g_last_error = what;
  return status;
}

ws_status map_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return WS_ERR_INVALID_ARGUMENT;
    case ErrorCode::kParse: return WS_ERR_PARSE;
    case ErrorCode::kIo: return WS_ERR_IO;
    case ErrorCode::kNumerical: return WS_ERR_NUMERICAL;
    case ErrorCode::kNotConverged: return WS_ERR_NOT_CONVERGED;
  }
  return WS_ERR_INTERNAL;
}

template <typename F>
ws_status guarded(F&& body) {
  try {
    body();
    return WS_OK;
  } catch (const Error& e) {
    return set_error(map_code(e.code()), e.what());
  } catch (const nlohmann::json::parse_error& e) {
    return set_error(WS_ERR_PARSE, e.what());
  } catch (const nlohmann::json::exception& e) {
    return set_error(WS_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return set_error(WS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(WS_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(WS_ERR_INTERNAL, "unknown error");
  }
}

void require_ptr(const void* p, const char* name) {
  require(p != nullptr, std::string(name) + " must not be null");
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

ws_graph* wrap(Graph g) {
  return new ws_graph{std::make_shared<const Graph>(std::move(g))};
}

std::unique_ptr<ws_fit> fit_dataset(const Dataset& data,
                                    const ws_fit_options* options) {
  ws_fit_options opts;
  ws_fit_options_init(&opts);
  if (options != nullptr) opts = *options;
  data.validate();
  const int d = data.dimension();
  const ScalingFilter filter =
      filter_by_name(opts.wavelet != nullptr ? opts.wavelet : "d4");
  const int j = opts.level >= 0
                    ? opts.level
                    : select_level(data.size(), d, opts.holder_exponent);
  const int resolution =
      opts.resolution > 0 ? opts.resolution : kDefaultPhiResolution;
  require((opts.domain_lo == nullptr) == (opts.domain_hi == nullptr),
          "domain_lo and domain_hi must be given together");
  Box domain{std::vector<double>(static_cast<std::size_t>(d), 0.0),
             std::vector<double>(static_cast<std::size_t>(d), 1.0)};
  if (opts.domain_lo != nullptr) {
    domain.lo.assign(opts.domain_lo, opts.domain_lo + d);
    domain.hi.assign(opts.domain_hi, opts.domain_hi + d);
  }
  const WaveletSieve sieve = make_sieve(filter, d, j, domain, opts.prune != 0);
  PhiTable table = cascade(filter, resolution);
  const double rho = opts.rho < 0.0 ? auto_rho(data.y) : opts.rho;
  const double rtol = opts.svd_rtol > 0.0 ? opts.svd_rtol : kDefaultSvdRtol;
  RegressionFit result = fit(data, sieve, table, rho, rtol);
  return std::unique_ptr<ws_fit>(new ws_fit{std::move(result), std::move(table)});
}

}  // namespace

extern "C" {

const char* ws_version(void) { return "1.0.0"; }

const char* ws_last_error(void) { return g_last_error.c_str(); }

const char* ws_status_name(ws_status status) {
  switch (status) {
    case WS_OK: return "ok";
    case WS_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case WS_ERR_PARSE: return "parse_error";
    case WS_ERR_IO: return "io_error";
    case WS_ERR_NUMERICAL: return "numerical_error";
    case WS_ERR_NOT_CONVERGED: return "not_converged";
    case WS_ERR_INTERNAL: return "internal_error";
  }
  return "unknown";
}

void ws_string_free(char* str) { std::free(str); }

ws_status ws_graph_load(const char* path, ws_graph** out) {
  return guarded([&] {
    require_ptr(path, "path");
    require_ptr(out, "out");
    *out = wrap(load_graph(path));
  });
}

ws_status ws_graph_from_edges(size_t node_count, const size_t* edges,
                              size_t edge_count, ws_graph** out) {
  return guarded([&] {
    require_ptr(out, "out");
    require(edge_count == 0 || edges != nullptr, "edges must not be null");
    std::vector<Edge> list;
    list.reserve(edge_count);
    for (size_t e = 0; e < edge_count; ++e) {
      list.push_back(Edge{edges[2 * e], edges[2 * e + 1]});
    }
    *out = wrap(Graph::from_edges(node_count, std::move(list)));
  });
}

ws_status ws_graph_torus(int rows, int cols, ws_graph** out) {
  return guarded([&] {
    require_ptr(out, "out");
    *out = wrap(torus_lattice(rows, cols));
  });
}

ws_status ws_graph_knn(size_t points, size_t k, uint64_t seed, ws_graph** out) {
  return guarded([&] {
    require_ptr(out, "out");
    *out = wrap(knn_geometric_graph(points, k, seed));
  });
}

ws_status ws_graph_from_source(const char* source, uint64_t seed,
                               ws_graph** out) {
  return guarded([&] {
    require_ptr(source, "source");
    require_ptr(out, "out");
    GraphSource src = GraphSource::parse(source);
    src.seed = seed;
    *out = wrap(src.build());
  });
}

ws_status ws_graph_add_chords(const ws_graph* graph, size_t count,
                              uint64_t seed, ws_graph** out) {
  return guarded([&] {
    require_ptr(graph, "graph");
    require_ptr(out, "out");
    *out = wrap(add_random_chords(*graph->graph, count, seed));
  });
}

ws_status ws_graph_save(const ws_graph* graph, const char* path) {
  return guarded([&] {
    require_ptr(graph, "graph");
    require_ptr(path, "path");
    save_graph(*graph->graph, path);
  });
}

size_t ws_graph_node_count(const ws_graph* graph) {
  return graph != nullptr ? graph->graph->node_count() : 0;
}

size_t ws_graph_edge_count(const ws_graph* graph) {
  return graph != nullptr ? graph->graph->edge_count() : 0;
}

ws_status ws_graph_eigen_bounds(const ws_graph* graph, double tol, double* h0,
                                double* hm) {
  return guarded([&] {
    require_ptr(graph, "graph");
    require_ptr(h0, "h0");
    require_ptr(hm, "hm");
    const EigenBounds b =
        eigen_bounds(*graph->graph, tol > 0.0 ? tol : kDefaultEigenTol);
    *h0 = b.h0;
    *hm = b.hm;
  });
}

ws_status ws_graph_eta_range(const ws_graph* graph, double* lo, double* hi) {
  return guarded([&] {
    require_ptr(graph, "graph");
    require_ptr(lo, "lo");
    require_ptr(hi, "hi");
    const EtaRange r = eta_range(*graph->graph);
    *lo = r.lo;
    *hi = r.hi;
  });
}

ws_status ws_graph_concliques(const ws_graph* graph, size_t* labels,
                              size_t* class_count) {
  return guarded([&] {
    require_ptr(graph, "graph");
    require_ptr(labels, "labels");
    const ConcliquePartition p = concliques(*graph->graph);
    std::copy(p.label.begin(), p.label.end(), labels);
    if (class_count != nullptr) *class_count = p.classes.size();
  });
}

ws_status ws_graph_connected_split(const ws_graph* graph, double test_fraction,
                                   uint64_t seed, unsigned char* in_test,
                                   int* learn_connected) {
  return guarded([&] {
    require_ptr(graph, "graph");
    require_ptr(in_test, "in_test");
    const Split s = connected_split(*graph->graph, test_fraction, seed);
    std::fill(in_test, in_test + graph->graph->node_count(), 0);
    for (NodeId v : s.test) in_test[v] = 1;
    if (learn_connected != nullptr) *learn_connected = s.learn_connected ? 1 : 0;
  });
}

void ws_graph_free(ws_graph* graph) { delete graph; }

ws_status ws_tau_from_eta(const ws_graph* graph, double eta, double* tau2) {
  return guarded([&] {
    require_ptr(graph, "graph");
    require_ptr(tau2, "tau2");
    const Eigen::VectorXd t = tau_from_eta(*graph->graph, eta);
    std::copy(t.data(), t.data() + t.size(), tau2);
  });
}

ws_status ws_simulate_field(const ws_graph* graph, double eta,
                            ws_sampler sampler, size_t iterations,
                            size_t burn_in, uint64_t seed, double* values,
                            double* symmetry_residual) {
  return guarded([&] {
    require_ptr(graph, "graph");
    require_ptr(values, "values");
    const GmrfSpec spec = make_gmrf_spec(graph->graph, eta);
    std::vector<double> field;
    double residual = 0.0;
    if (sampler == WS_SAMPLER_DIRECT) {
      DirectSample s = direct_sample(spec, seed);
      field = std::move(s.field.values);
      residual = s.symmetry_residual;
    } else if (sampler == WS_SAMPLER_GIBBS) {
      ChainConfig cfg;
      cfg.iterations = iterations;
      cfg.burn_in = burn_in;
      cfg.seed = seed;
      cfg.validate();
      field = gibbs_chain(spec, concliques(*graph->graph), cfg).final_state.values;
    } else {
      fail(ErrorCode::kInvalidArgument, "unknown sampler");
    }
    std::copy(field.begin(), field.end(), values);
    if (symmetry_residual != nullptr) *symmetry_residual = residual;
  });
}

ws_status ws_write_field_csv(const double* values, size_t count,
                             const char* path) {
  return guarded([&] {
    require(count == 0 || values != nullptr, "values must not be null");
    require_ptr(path, "path");
    FieldSample field{std::vector<double>(values, values + count), "field"};
    write_field_csv(field, path);
  });
}

double ws_normal_cdf(double x) { return normal_cdf(x); }

ws_status ws_phi_table_create(const char* wavelet, int resolution,
                              ws_phi_table** out) {
  return guarded([&] {
    require_ptr(wavelet, "wavelet");
    require_ptr(out, "out");
    *out = new ws_phi_table{cascade(
        filter_by_name(wavelet),
        resolution > 0 ? resolution : kDefaultPhiResolution)};
  });
}

double ws_phi_table_eval(const ws_phi_table* table, double x) {
  return table != nullptr ? table->table(x) : NAN;
}

ws_status ws_phi_table_write_csv(const ws_phi_table* table, const char* path) {
  return guarded([&] {
    require_ptr(table, "table");
    require_ptr(path, "path");
    table->table.write_csv(path);
  });
}

void ws_phi_table_free(ws_phi_table* table) { delete table; }

void ws_fit_options_init(ws_fit_options* options) {
  if (options == nullptr) return;
  options->wavelet = "d4";
  options->level = -1;
  options->holder_exponent = 1.0;
  options->rho = -1.0;
  options->svd_rtol = kDefaultSvdRtol;
  options->resolution = kDefaultPhiResolution;
  options->prune = 1;
  options->domain_lo = nullptr;
  options->domain_hi = nullptr;
}

ws_status ws_fit_create(const double* x, const double* y, size_t rows,
                        size_t dims, const ws_fit_options* options,
                        ws_fit** out) {
  return guarded([&] {
    require_ptr(x, "x");
    require_ptr(y, "y");
    require_ptr(out, "out");
    require(rows > 0 && dims > 0, "dataset must be non-empty");
    Dataset data;
    data.x = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                            Eigen::RowMajor>>(
        x, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(dims));
    data.y = Eigen::Map<const Eigen::VectorXd>(y, static_cast<Eigen::Index>(rows));
    *out = fit_dataset(data, options).release();
  });
}

ws_status ws_fit_dataset_csv(const char* path, const ws_fit_options* options,
                             ws_fit** out) {
  return guarded([&] {
    require_ptr(path, "path");
    require_ptr(out, "out");
    *out = fit_dataset(read_dataset_csv(path), options).release();
  });
}

ws_status ws_fit_from_json(const char* json, int resolution, ws_fit** out) {
  return guarded([&] {
    require_ptr(json, "json");
    require_ptr(out, "out");
    RegressionFit f = fit_from_json(nlohmann::json::parse(json));
    PhiTable table = cascade(f.sieve.filter, resolution > 0
                                                 ? resolution
                                                 : kDefaultPhiResolution);
    *out = new ws_fit{std::move(f), std::move(table)};
  });
}

ws_status ws_fit_to_json(const ws_fit* fit, char** json) {
  return guarded([&] {
    require_ptr(fit, "fit");
    require_ptr(json, "json");
    *json = copy_string(fit_to_json(fit->fit).dump(2));
  });
}

ws_status ws_fit_predict(const ws_fit* fit, const double* x, size_t dims,
                         double* value) {
  return guarded([&] {
    require_ptr(fit, "fit");
    require_ptr(x, "x");
    require_ptr(value, "value");
    require(dims == static_cast<size_t>(fit->fit.sieve.d),
            "point dimension does not match the fit");
    *value = predict(fit->fit, fit->table, std::span<const double>(x, dims));
  });
}

size_t ws_fit_dimension(const ws_fit* fit) {
  return fit != nullptr ? static_cast<size_t>(fit->fit.sieve.d) : 0;
}

int ws_fit_level(const ws_fit* fit) {
  return fit != nullptr ? fit->fit.sieve.j : -1;
}

int ws_fit_degenerate(const ws_fit* fit) {
  return fit != nullptr && fit->fit.svd.degenerate ? 1 : 0;
}

void ws_fit_free(ws_fit* fit) { delete fit; }

int ws_select_level(size_t sample_size, int dims, double holder_exponent) {
  try {
    return select_level(sample_size, dims, holder_exponent);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return -1;
  }
}

ws_status ws_run_experiment(const char* config_json, const char* out_dir,
                            char** summary_json) {
  return guarded([&] {
    ExperimentConfig cfg = config_json != nullptr && *config_json != '\0'
                               ? config_from_json(nlohmann::json::parse(config_json))
                               : bivariate_preset();
    if (out_dir != nullptr) cfg.output_dir = out_dir;
    cfg.validate();
    const ExperimentResult result = run_experiment(cfg);
    emit_table(result, cfg, cfg.output_dir);
    if (summary_json != nullptr) {
      *summary_json = copy_string(results_json(result, cfg).dump(2));
    }
  });
}

ws_status ws_block_size_q(double sample_size, double c1, int* q) {
  return guarded([&] {
    require_ptr(q, "q");
    *q = block_size_q(sample_size, c1);
  });
}

ws_status ws_covering_bound(int vc_dimension, double range_width, double eps,
                            double p, double* value) {
  return guarded([&] {
    require_ptr(value, "value");
    *value = covering_bound(vc_dimension, range_width, eps, p);
  });
}

ws_status ws_rate_curve(int dims, double holder_exponent, int lattice_dim,
                        const double* sizes, size_t count, double* values) {
  return guarded([&] {
    require(count == 0 || (sizes != nullptr && values != nullptr),
            "sizes and values must not be null");
    const std::vector<double> curve = rate_curve(
        dims, holder_exponent, lattice_dim, std::span<const double>(sizes, count));
    std::copy(curve.begin(), curve.end(), values);
  });
}

ws_status ws_write_curve_csv(const double* sizes, const double* values,
                             size_t count, const char* path) {
  return guarded([&] {
    require(count == 0 || (sizes != nullptr && values != nullptr),
            "sizes and values must not be null");
    require_ptr(path, "path");
    std::vector<CurvePoint> points(count);
    for (size_t i = 0; i < count; ++i) points[i] = {sizes[i], values[i]};
    write_curve_csv(points, path);
  });
}

}  // extern "C"
