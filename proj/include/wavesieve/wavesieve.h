/*
 * C interface to the wavesieve library.
 *
 * Objects are opaque handles created by ws_*_create/load functions and
 * released with the matching ws_*_free. Every fallible call returns a
 * ws_status; on failure ws_last_error() describes the cause for the calling
 * thread until its next failing call. Strings returned through char** out
 * parameters are owned by the caller and released with ws_string_free.
 */
#ifndef WAVESIEVE_WAVESIEVE_H_
#define WAVESIEVE_WAVESIEVE_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(WAVESIEVE_BUILDING)
#define WS_API __declspec(dllexport)
#else
#define WS_API __declspec(dllimport)
#endif
#else
#define WS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ws_status {
  WS_OK = 0,
  WS_ERR_INVALID_ARGUMENT = 1,
  WS_ERR_PARSE = 2,
  WS_ERR_IO = 3,
  WS_ERR_NUMERICAL = 4,
  WS_ERR_NOT_CONVERGED = 5,
  WS_ERR_INTERNAL = 99
} ws_status;

typedef struct ws_graph ws_graph;
typedef struct ws_phi_table ws_phi_table;
typedef struct ws_fit ws_fit;

WS_API const char* ws_version(void);
WS_API const char* ws_last_error(void);
WS_API const char* ws_status_name(ws_status status);
WS_API void ws_string_free(char* str);

/* Graphs */
WS_API ws_status ws_graph_load(const char* path, ws_graph** out);
WS_API ws_status ws_graph_from_edges(size_t node_count, const size_t* edges,
                                     size_t edge_count, ws_graph** out);
WS_API ws_status ws_graph_torus(int rows, int cols, ws_graph** out);
WS_API ws_status ws_graph_knn(size_t points, size_t k, uint64_t seed,
                              ws_graph** out);
/* "torus:RxC", "knn:P,K" or "file:PATH", optionally with "+N" chords. */
WS_API ws_status ws_graph_from_source(const char* source, uint64_t seed,
                                      ws_graph** out);
WS_API ws_status ws_graph_add_chords(const ws_graph* graph, size_t count,
                                     uint64_t seed, ws_graph** out);
WS_API ws_status ws_graph_save(const ws_graph* graph, const char* path);
WS_API size_t ws_graph_node_count(const ws_graph* graph);
WS_API size_t ws_graph_edge_count(const ws_graph* graph);
WS_API ws_status ws_graph_eigen_bounds(const ws_graph* graph, double tol,
                                       double* h0, double* hm);
WS_API ws_status ws_graph_eta_range(const ws_graph* graph, double* lo,
                                    double* hi);
/* labels must hold node_count entries. */
WS_API ws_status ws_graph_concliques(const ws_graph* graph, size_t* labels,
                                     size_t* class_count);
/* in_test must hold node_count entries; set to 1 for V_T, 0 for V_L. */
WS_API ws_status ws_graph_connected_split(const ws_graph* graph,
                                          double test_fraction, uint64_t seed,
                                          unsigned char* in_test,
                                          int* learn_connected);
WS_API void ws_graph_free(ws_graph* graph);

/* Gaussian Markov random fields */
typedef enum ws_sampler { WS_SAMPLER_GIBBS = 0, WS_SAMPLER_DIRECT = 1 } ws_sampler;

/* tau2 must hold node_count entries. */
WS_API ws_status ws_tau_from_eta(const ws_graph* graph, double eta,
                                 double* tau2);
/* Draws one field with mean 0 and unit marginal variance; values must hold
 * node_count entries. For the direct sampler, symmetry_residual (optional)
 * receives max|A - A^T| of the model covariance. */
WS_API ws_status ws_simulate_field(const ws_graph* graph, double eta,
                                   ws_sampler sampler, size_t iterations,
                                   size_t burn_in, uint64_t seed,
                                   double* values, double* symmetry_residual);
WS_API ws_status ws_write_field_csv(const double* values, size_t count,
                                    const char* path);
WS_API double ws_normal_cdf(double x);

/* Scaling functions */
WS_API ws_status ws_phi_table_create(const char* wavelet, int resolution,
                                     ws_phi_table** out);
WS_API double ws_phi_table_eval(const ws_phi_table* table, double x);
WS_API ws_status ws_phi_table_write_csv(const ws_phi_table* table,
                                        const char* path);
WS_API void ws_phi_table_free(ws_phi_table* table);

/* Regression */
typedef struct ws_fit_options {
  const char* wavelet;    /* "haar" or "d4" */
  int level;              /* < 0: choose from the sample size */
  double holder_exponent; /* r in (0, 1] used when level < 0 */
  double rho;             /* < 0: automatic; INFINITY: no truncation */
  double svd_rtol;        /* <= 0: library default */
  int resolution;         /* phi table resolution; <= 0: default */
  int prune;              /* nonzero: drop translations missing the domain */
  const double* domain_lo; /* NULL: unit cube */
  const double* domain_hi;
} ws_fit_options;

WS_API void ws_fit_options_init(ws_fit_options* options);
/* x is row-major rows x dims. */
WS_API ws_status ws_fit_create(const double* x, const double* y, size_t rows,
                               size_t dims, const ws_fit_options* options,
                               ws_fit** out);
WS_API ws_status ws_fit_dataset_csv(const char* path,
                                    const ws_fit_options* options,
                                    ws_fit** out);
WS_API ws_status ws_fit_from_json(const char* json, int resolution,
                                  ws_fit** out);
WS_API ws_status ws_fit_to_json(const ws_fit* fit, char** json);
WS_API ws_status ws_fit_predict(const ws_fit* fit, const double* x,
                                size_t dims, double* value);
WS_API size_t ws_fit_dimension(const ws_fit* fit);
WS_API int ws_fit_level(const ws_fit* fit);
WS_API int ws_fit_degenerate(const ws_fit* fit);
WS_API void ws_fit_free(ws_fit* fit);
WS_API int ws_select_level(size_t sample_size, int dims, double holder_exponent);

/* Experiments */
/* Runs the experiment described by config_json (see README), writes the
 * result files into out_dir (overrides the config's output_dir when not
 * NULL) and returns the results document through summary_json (optional). */
WS_API ws_status ws_run_experiment(const char* config_json, const char* out_dir,
                                   char** summary_json);

/* Theory helpers */
WS_API ws_status ws_block_size_q(double sample_size, double c1, int* q);
WS_API ws_status ws_covering_bound(int vc_dimension, double range_width,
                                   double eps, double p, double* value);
WS_API ws_status ws_rate_curve(int dims, double holder_exponent,
                               int lattice_dim, const double* sizes,
                               size_t count, double* values);
WS_API ws_status ws_write_curve_csv(const double* sizes, const double* values,
                                    size_t count, const char* path);

#ifdef __cplusplus
}
#endif

#endif /* WAVESIEVE_WAVESIEVE_H_ */
