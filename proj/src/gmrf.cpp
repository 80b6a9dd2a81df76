#include "wavesieve/gmrf.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

#include "wavesieve/error.hpp"

namespace wavesieve {

void GmrfSpec::validate(const EtaRange& range) const {
  require(graph != nullptr, "gmrf spec without a graph");
  const auto n = static_cast<Eigen::Index>(graph->node_count());
  require(alpha.size() == n && tau2.size() == n,
          "gmrf spec vectors must match the node count");
  require(range.contains(eta) || (eta == 0.0 && graph->edge_count() == 0),
          "eta = " + std::to_string(eta) + " outside admissible range (" +
              std::to_string(range.lo) + ", " + std::to_string(range.hi) +
              ")");
  require((tau2.array() > 0.0).all(), "all tau2 must be positive");
  require(sigma2 > 0.0, "sigma2 must be positive");
}

void ChainConfig::validate() const {
  require(iterations == 0 || burn_in < iterations,
          "burn_in must be smaller than iterations");
}

namespace {

Eigen::MatrixXd inverse_of_i_minus_eta_h(const Graph& g, double eta) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) - eta * g.dense_adjacency();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  if (n > 0 && !(lu.rcond() > 1e-14)) {
    fail(ErrorCode::kNumerical,
         "I - eta H is numerically singular for eta = " + std::to_string(eta));
  }
  return lu.inverse();
}

}  // namespace

Eigen::VectorXd tau_from_eta(const Graph& g, double eta, double sigma2) {
  require(sigma2 > 0.0, "sigma2 must be positive");
  const auto n = static_cast<Eigen::Index>(g.node_count());
  if (eta == 0.0 || g.edge_count() == 0) {
    return Eigen::VectorXd::Constant(n, sigma2);
  }
  const EtaRange range = eta_range(g);
  require(range.contains(eta),
          "eta = " + std::to_string(eta) + " outside admissible range (" +
              std::to_string(range.lo) + ", " + std::to_string(range.hi) + ")");
  const Eigen::VectorXd diag = inverse_of_i_minus_eta_h(g, eta).diagonal();
  if (!(diag.array() > 0.0).all()) {
    fail(ErrorCode::kNumerical, "non-positive diagonal in (I - eta H)^{-1}");
  }
  return sigma2 * diag.cwiseInverse();
}

GmrfSpec make_gmrf_spec(std::shared_ptr<const Graph> graph, double eta,
                        const EtaRange& range, double mean, double sigma2) {
  require(graph != nullptr, "gmrf spec without a graph");
  require(range.contains(eta) || eta == 0.0,
          "eta = " + std::to_string(eta) + " outside admissible range (" +
              std::to_string(range.lo) + ", " + std::to_string(range.hi) + ")");
  const auto n = static_cast<Eigen::Index>(graph->node_count());
  GmrfSpec spec;
  spec.alpha = Eigen::VectorXd::Constant(n, mean);
  spec.eta = eta;
  spec.sigma2 = sigma2;
  if (eta == 0.0) {
    spec.tau2 = Eigen::VectorXd::Constant(n, sigma2);
  } else {
    const Eigen::VectorXd diag = inverse_of_i_minus_eta_h(*graph, eta).diagonal();
    if (!(diag.array() > 0.0).all()) {
      fail(ErrorCode::kNumerical, "non-positive diagonal in (I - eta H)^{-1}");
    }
    spec.tau2 = sigma2 * diag.cwiseInverse();
  }
  spec.graph = std::move(graph);
  return spec;
}

GmrfSpec make_gmrf_spec(std::shared_ptr<const Graph> graph, double eta,
                        double mean, double sigma2) {
  require(graph != nullptr, "gmrf spec without a graph");
  if (graph->edge_count() == 0) {
    require(eta == 0.0, "edgeless graph admits only eta = 0");
    return make_gmrf_spec(std::move(graph), eta, EtaRange{-1.0, 1.0}, mean,
                          sigma2);
  }
  const EtaRange range = eta_range(*graph);
  return make_gmrf_spec(std::move(graph), eta, range, mean, sigma2);
}

ConditionalParams conditional_params(const GmrfSpec& spec,
                                     std::span<const double> state, NodeId s) {
  double acc = 0.0;
  for (NodeId t : spec.graph->neighbors(s)) {
    acc += state[t] - spec.alpha[static_cast<Eigen::Index>(t)];
  }
  const auto si = static_cast<Eigen::Index>(s);
  return {spec.alpha[si] + spec.eta * acc, spec.tau2[si]};
}

namespace {

std::vector<double> initial_state(const GmrfSpec& spec) {
  return {spec.alpha.data(), spec.alpha.data() + spec.alpha.size()};
}

void check_chain_inputs(const GmrfSpec& spec,
                        const ConcliquePartition& partition,
                        const ChainConfig& cfg) {
  require(spec.graph != nullptr, "gmrf spec without a graph");
  cfg.validate();
  require(partition.valid_for(*spec.graph),
          "conclique partition does not match the graph");
}

bool keep_in_trace(const ChainConfig& cfg, std::size_t sweep) {
  // sweep is 1-based; post-burn-in sweeps are burn_in+1 .. iterations.
  return cfg.thin > 0 && sweep > cfg.burn_in &&
         (sweep - cfg.burn_in) % cfg.thin == 0;
}

}  // namespace

ChainResult gibbs_chain(const GmrfSpec& spec,
                        const ConcliquePartition& partition,
                        const ChainConfig& cfg) {
  check_chain_inputs(spec, partition, cfg);
  Rng rng(cfg.seed);
  std::vector<double> state = initial_state(spec);
  const Eigen::VectorXd sd = spec.tau2.cwiseSqrt();
  ChainResult result;
  for (std::size_t sweep = 1; sweep <= cfg.iterations; ++sweep) {
    for (const auto& cls : partition.classes) {
      for (NodeId s : cls) {
        const ConditionalParams p = conditional_params(spec, state, s);
        state[s] = p.mean + sd[static_cast<Eigen::Index>(s)] * rng.normal();
      }
    }
    if (keep_in_trace(cfg, sweep)) result.trace.push_back(state);
  }
  result.final_state.values = std::move(state);
  return result;
}

std::pair<ChainResult, ChainResult> gibbs_chain_coupled(
    const GmrfSpec& first, const GmrfSpec& second,
    const ConcliquePartition& partition, const ChainConfig& cfg, double rho) {
  check_chain_inputs(first, partition, cfg);
  check_chain_inputs(second, partition, cfg);
  require(first.graph->node_count() == second.graph->node_count(),
          "coupled chains need the same graph");
  require(std::abs(rho) < 1.0, "copula correlation must satisfy |rho| < 1");
  const double rho_c = std::sqrt(1.0 - rho * rho);

  Rng rng(cfg.seed);
  std::vector<double> a = initial_state(first);
  std::vector<double> b = initial_state(second);
  const Eigen::VectorXd sd_a = first.tau2.cwiseSqrt();
  const Eigen::VectorXd sd_b = second.tau2.cwiseSqrt();
  std::pair<ChainResult, ChainResult> out;
  for (std::size_t sweep = 1; sweep <= cfg.iterations; ++sweep) {
    for (const auto& cls : partition.classes) {
      for (NodeId s : cls) {
        const double u = rng.normal();
        const double v = rng.normal();
        const auto si = static_cast<Eigen::Index>(s);
        a[s] = conditional_params(first, a, s).mean + sd_a[si] * u;
        b[s] = conditional_params(second, b, s).mean +
               sd_b[si] * (rho * u + rho_c * v);
      }
    }
    if (keep_in_trace(cfg, sweep)) {
      out.first.trace.push_back(a);
      out.second.trace.push_back(b);
    }
  }
  out.first.final_state.values = std::move(a);
  out.second.final_state.values = std::move(b);
  return out;
}

Eigen::MatrixXd gmrf_covariance(const GmrfSpec& spec) {
  require(spec.graph != nullptr, "gmrf spec without a graph");
  Eigen::MatrixXd a = inverse_of_i_minus_eta_h(*spec.graph, spec.eta);
  return a * spec.tau2.asDiagonal();
}

DirectSampler::DirectSampler(const GmrfSpec& spec) : alpha_(spec.alpha) {
  Eigen::MatrixXd a = gmrf_covariance(spec);
  symmetry_residual_ =
      a.size() == 0 ? 0.0 : (a - a.transpose()).cwiseAbs().maxCoeff();
  symmetrized_ = symmetry_residual_ > kSymmetryTol;
  covariance_ = 0.5 * (a + a.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(covariance_);
  if (llt.info() != Eigen::Success) {
    fail(ErrorCode::kNumerical, "model covariance is not positive definite");
  }
  factor_ = llt.matrixL();
}

std::vector<double> DirectSampler::draw(Rng& rng) const {
  Eigen::VectorXd z(alpha_.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  const Eigen::VectorXd x = alpha_ + factor_.triangularView<Eigen::Lower>() * z;
  return {x.data(), x.data() + x.size()};
}

DirectSample direct_sample(const GmrfSpec& spec, std::uint64_t seed) {
  const DirectSampler sampler(spec);
  Rng rng(seed);
  DirectSample out;
  out.field.values = sampler.draw(rng);
  out.symmetry_residual = sampler.symmetry_residual();
  out.symmetrized = sampler.symmetrized();
  return out;
}

std::vector<std::pair<double, double>> coupled_innovation_pairs(
    double rho, std::size_t count, std::uint64_t seed) {
  require(std::abs(rho) < 1.0, "copula correlation must satisfy |rho| < 1");
  const double rho_c = std::sqrt(1.0 - rho * rho);
  Rng rng(seed);
  std::vector<std::pair<double, double>> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double u = rng.normal();
    const double v = rng.normal();
    out.emplace_back(u, rho * u + rho_c * v);
  }
  return out;
}

void couple_fields(std::span<const double> first, std::span<double> second,
                   double rho) {
  require(first.size() == second.size(), "coupled fields differ in length");
  require(std::abs(rho) < 1.0, "copula correlation must satisfy |rho| < 1");
  const double rho_c = std::sqrt(1.0 - rho * rho);
  for (std::size_t i = 0; i < first.size(); ++i) {
    second[i] = rho * first[i] + rho_c * second[i];
  }
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

FieldSample to_uniform(const FieldSample& field, double mean, double sd) {
  require(sd > 0.0, "standard deviation must be positive");
  FieldSample out;
  out.component_id = field.component_id;
  out.values.reserve(field.values.size());
  for (double v : field.values) out.values.push_back(normal_cdf((v - mean) / sd));
  return out;
}

void write_field_csv(const FieldSample& field,
                     const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot write field file " + path.string());
  out << "node_id,value\n"
      << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t s = 0; s < field.values.size(); ++s) {
    out << s << ',' << field.values[s] << '\n';
  }
  if (!out) fail(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace wavesieve
