#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wavesieve/graph.hpp"
#include "wavesieve/rng.hpp"

namespace wavesieve {

// Conditional autoregression on a graph: Y(s) | rest is normal with mean
// alpha(s) + eta * sum_{t ~ s} (Y(t) - alpha(t)) and variance tau2(s).
struct GmrfSpec {
  std::shared_ptr<const Graph> graph;
  Eigen::VectorXd alpha;
  double eta = 0.0;
  Eigen::VectorXd tau2;
  double sigma2 = 1.0;

  std::size_t node_count() const { return graph ? graph->node_count() : 0; }
  // Throws unless eta lies strictly inside `range` and all tau2 > 0.
  void validate(const EtaRange& range) const;
};

struct FieldSample {
  std::vector<double> values;
  std::string component_id;
};

struct ChainConfig {
  std::size_t iterations = 3000;
  std::size_t burn_in = 600;
  std::uint64_t seed = 1;
  // Keep every `thin`-th post-burn-in sweep in the trace; 0 disables the
  // trace.
  std::size_t thin = 0;

  void validate() const;
};

// Conditional variances tau2(s) = sigma2 / [(I - eta H)^{-1}](s, s), which
// give every node marginal variance sigma2 under (I - eta H)^{-1} T.
Eigen::VectorXd tau_from_eta(const Graph& g, double eta, double sigma2 = 1.0);

// Builds a spec with constant mean and tau2 from tau_from_eta. Checks eta
// against eta_range(g).
GmrfSpec make_gmrf_spec(std::shared_ptr<const Graph> graph, double eta,
                        double mean = 0.0, double sigma2 = 1.0);
// Same, with a precomputed range (avoids repeated eigen solves).
GmrfSpec make_gmrf_spec(std::shared_ptr<const Graph> graph, double eta,
                        const EtaRange& range, double mean = 0.0,
                        double sigma2 = 1.0);

struct ConditionalParams {
  double mean = 0.0;
  double var = 0.0;
};

ConditionalParams conditional_params(const GmrfSpec& spec,
                                     std::span<const double> state, NodeId s);

struct ChainResult {
  FieldSample final_state;
  std::vector<std::vector<double>> trace;  // thinned post-burn-in states
};

// Conclique-blocked Gibbs sampler. Starts from alpha; each sweep visits the
// classes in index order and redraws every node of the class (ascending id)
// from its full conditional. All nodes of one class are conditionally
// independent given the others, so the in-class order does not change the
// law. Returns the state after `iterations` sweeps.
ChainResult gibbs_chain(const GmrfSpec& spec,
                        const ConcliquePartition& partition,
                        const ChainConfig& cfg);

// Two chains on the same graph whose per-node innovations are drawn as a
// correlated pair (U, rho U + sqrt(1 - rho^2) V) at every update.
std::pair<ChainResult, ChainResult> gibbs_chain_coupled(
    const GmrfSpec& first, const GmrfSpec& second,
    const ConcliquePartition& partition, const ChainConfig& cfg, double rho);

// Exact sampler from N(alpha, A) with A = (I - eta H)^{-1} T. A is
// symmetrized when it is not symmetric to 1e-10; the residual
// max|A - A^T| is reported.
class DirectSampler {
 public:
  explicit DirectSampler(const GmrfSpec& spec);

  std::vector<double> draw(Rng& rng) const;
  double symmetry_residual() const { return symmetry_residual_; }
  bool symmetrized() const { return symmetrized_; }
  const Eigen::MatrixXd& covariance() const { return covariance_; }

 private:
  Eigen::VectorXd alpha_;
  Eigen::MatrixXd covariance_;
  Eigen::MatrixXd factor_;  // lower Cholesky factor of covariance_
  double symmetry_residual_ = 0.0;
  bool symmetrized_ = false;
};

inline constexpr double kSymmetryTol = 1e-10;

struct DirectSample {
  FieldSample field;
  double symmetry_residual = 0.0;
  bool symmetrized = false;
};

DirectSample direct_sample(const GmrfSpec& spec, std::uint64_t seed);

// Model covariance (I - eta H)^{-1} T, unsymmetrized.
Eigen::MatrixXd gmrf_covariance(const GmrfSpec& spec);

// `count` pairs of standard normals with correlation rho.
std::vector<std::pair<double, double>> coupled_innovation_pairs(
    double rho, std::size_t count, std::uint64_t seed);

// Post-hoc coupling of two standardized fields: second := rho * first +
// sqrt(1 - rho^2) * second.
void couple_fields(std::span<const double> first, std::span<double> second,
                   double rho);

double normal_cdf(double x);

// Standard normal CDF of (value - mean) / sd, componentwise.
FieldSample to_uniform(const FieldSample& field, double mean, double sd);

void write_field_csv(const FieldSample& field, const std::filesystem::path& path);

}  // namespace wavesieve
