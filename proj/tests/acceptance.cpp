// Acceptance suite. Prints one PASS/FAIL line per criterion; with no
// arguments runs all of them, otherwise only the listed criterion numbers.
// Exit status is 0 only when every selected criterion passes.

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "wavesieve/error.hpp"
#include "wavesieve/experiment.hpp"
#include "wavesieve/gmrf.hpp"
#include "wavesieve/graph.hpp"
#include "wavesieve/regression.hpp"
#include "wavesieve/rng.hpp"
#include "wavesieve/theory.hpp"
#include "wavesieve/wavelet.hpp"

using namespace wavesieve;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Eigen::MatrixXd adjacency(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [a, b] : g.edges()) {
    h(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = 1.0;
    h(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = 1.0;
  }
  return h;
}

Eigen::MatrixXd model_covariance(const Graph& g, double eta, const Eigen::VectorXd& tau2) {
  const Eigen::MatrixXd h = adjacency(g);
  const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(h.rows(), h.cols()) - eta * h;
  return m.fullPivLu().solve(Eigen::MatrixXd(tau2.asDiagonal()));
}

Eigen::MatrixXd empirical_covariance(const std::vector<std::vector<double>>& draws) {
  const auto n = static_cast<Eigen::Index>(draws.front().size());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(n, n);
  for (const auto& d : draws) {
    const Eigen::Map<const Eigen::VectorXd> v(d.data(), n);
    mean += v;
    second.selfadjointView<Eigen::Lower>().rankUpdate(v);
  }
  const double k = static_cast<double>(draws.size());
  mean /= k;
  Eigen::MatrixXd cov = Eigen::MatrixXd(second.selfadjointView<Eigen::Lower>()) / k;
  return cov - mean * mean.transpose();
}

// 1. Filter identities.
Outcome filter_identities() {
  double worst = 0.0;
  for (const ScalingFilter& f : {haar_filter(), d4_filter()}) {
    const int L = static_cast<int>(f.length());
    auto at = [&](const std::vector<double>& c, int i) {
      return (i >= 0 && i < L) ? c[static_cast<std::size_t>(i)] : 0.0;
    };
    double sum = 0.0;
    for (double v : f.h) sum += v;
    worst = std::max(worst, std::abs(sum - std::numbers::sqrt2));
    for (int z = -L; z <= L; ++z) {
      double hh = 0.0, gg = 0.0, gh = 0.0;
      for (int l = 0; l < L; ++l) {
        hh += at(f.h, l) * at(f.h, l + 2 * z);
        gg += at(f.g, l) * at(f.g, l + 2 * z);
        gh += at(f.g, l) * at(f.h, l + 2 * z);
      }
      const double delta = z == 0 ? 1.0 : 0.0;
      worst = std::max({worst, std::abs(hh - delta), std::abs(gg - delta), std::abs(gh)});
    }
    TensorCoefficients a = mother_tensor_coeffs(f, 2);
    for (std::size_t j = 0; j < 4; ++j) {
      for (std::size_t k = 0; k < 4; ++k) {
        for (int g1 = -2; g1 <= 2; ++g1) {
          for (int g2 = -2; g2 <= 2; ++g2) {
            double s = 0.0;
            for (int p1 = -L; p1 <= L; ++p1) {
              for (int p2 = -L; p2 <= L; ++p2) {
                const std::vector<int> gp{p1, p2};
                const std::vector<int> shifted{2 * g1 + p1, 2 * g2 + p2};
                s += a(j, gp) * a(k, shifted);
              }
            }
            const double expect = (j == k && g1 == 0 && g2 == 0) ? 4.0 : 0.0;
            worst = std::max(worst, std::abs(s - expect));
          }
        }
      }
    }
  }
  return {worst <= 1e-12, "max residual " + fmt(worst)};
}

// 2. Cascade correctness.
Outcome cascade_correctness() {
  const ScalingFilter d4 = d4_filter();
  const PhiTable t = cascade(d4, 10);
  Eigen::Matrix2d m;
  m << std::numbers::sqrt2 * d4.h[1], std::numbers::sqrt2 * d4.h[0],
      std::numbers::sqrt2 * d4.h[3], std::numbers::sqrt2 * d4.h[2];
  Eigen::EigenSolver<Eigen::Matrix2d> es(m);
  Eigen::Index one = 0;
  (es.eigenvalues().array() - 1.0).abs().minCoeff(&one);
  Eigen::Vector2d v = es.eigenvectors().col(one).real();
  v /= v.sum();
  const double sqrt3 = std::sqrt(3.0);
  const double int_err = std::max({std::abs(t(1.0) - v[0]), std::abs(t(2.0) - v[1]),
                                   std::abs(t(1.0) - (1 + sqrt3) / 2),
                                   std::abs(t(2.0) - (1 - sqrt3) / 2)});

  double pou = 0.0, refine = 0.0;
  for (const ScalingFilter& f : {haar_filter(), d4}) {
    const PhiTable tf = cascade(f, 10);
    const double step = std::ldexp(1.0, -10);
    for (int k = 0; k < 1024; ++k) {
      double s = 0.0;
      for (int g = -4; g <= 4; ++g) s += tf(k * step - g);
      pou = std::max(pou, std::abs(s - 1.0));
    }
    const int points = static_cast<int>(tf.values().size());
    for (int k = 0; k < points; ++k) {
      const double x = k * tf.step();
      double rhs = 0.0;
      for (std::size_t l = 0; l < f.length(); ++l) rhs += f.h[l] * tf(2 * x - static_cast<double>(l));
      refine = std::max(refine, std::abs(tf(x) - std::numbers::sqrt2 * rhs));
    }
  }
  return {int_err <= 1e-10 && pou <= 1e-6 && refine <= 1e-8,
          "integer values " + fmt(int_err) + ", partition of unity " + fmt(pou) +
              ", refinement " + fmt(refine)};
}

// 3. Least-squares oracle.
Outcome least_squares_oracle() {
  Rng rng(3);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::MatrixXd a(50, 9);
    Eigen::VectorXd b(50);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = rng.normal();
    for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = rng.normal();
    const Eigen::VectorXd oracle = (a.transpose() * a).ldlt().solve(a.transpose() * b);
    const Eigen::VectorXd got = svd_solve(a, b, kDefaultSvdRtol);
    worst = std::max(worst, (got - oracle).norm() / oracle.norm());
  }
  return {worst <= 1e-8, "max relative error " + fmt(worst)};
}

// 4. GMRF stationarity oracle.
Outcome gmrf_stationarity() {
  auto g = std::make_shared<const Graph>(torus_lattice(6, 6));
  const double eta = 0.2;
  GmrfSpec spec = make_gmrf_spec(g, eta);
  const double tau_spread = spec.tau2.maxCoeff() - spec.tau2.minCoeff();
  const std::size_t kept = 100000, thin = 5, burn_in = 1000;
  ChainResult chain = gibbs_chain(spec, concliques(*g),
                                  ChainConfig{burn_in + kept * thin, burn_in, 41, thin});
  const Eigen::MatrixXd oracle = model_covariance(*g, eta, spec.tau2);
  const Eigen::MatrixXd gibbs_cov = empirical_covariance(chain.trace);
  const double gibbs_err = (gibbs_cov - oracle).cwiseAbs().maxCoeff();

  DirectSampler direct(spec);
  Rng rng(42);
  std::vector<std::vector<double>> draws;
  draws.reserve(kept);
  for (std::size_t i = 0; i < kept; ++i) draws.push_back(direct.draw(rng));
  const Eigen::MatrixXd direct_cov = empirical_covariance(draws);
  const double direct_err = (direct_cov - oracle).cwiseAbs().maxCoeff();
  const double agree = (direct_cov - gibbs_cov).cwiseAbs().maxCoeff();
  return {chain.trace.size() == kept && tau_spread < 1e-12 && gibbs_err < 0.05 &&
              direct_err < 0.05 && agree < 0.05,
          std::to_string(chain.trace.size()) + " states, gibbs vs model " + fmt(gibbs_err) +
              ", direct vs model " + fmt(direct_err) + ", gibbs vs direct " + fmt(agree)};
}

// 5. Spectral and range checks.
Outcome spectral_checks() {
  double range_err = 0.0;
  for (int side : {4, 6, 8, 10, 18}) {
    const EtaRange r = eta_range(torus_lattice(side, side), 1e-12);
    range_err = std::max({range_err, std::abs(r.lo + 0.25), std::abs(r.hi - 0.25)});
  }
  const EigenBounds edge = eigen_bounds(Graph::from_edges(2, {{0, 1}}), 1e-13);
  const EigenBounds tri = eigen_bounds(complete_graph(3), 1e-13);
  const double eig_err = std::max({std::abs(edge.h0 + 1.0), std::abs(edge.hm - 1.0),
                                   std::abs(tri.h0 + 1.0), std::abs(tri.hm - 2.0)});
  return {range_err <= 1e-6 && eig_err <= 1e-10,
          "torus range " + fmt(range_err) + ", small graphs " + fmt(eig_err)};
}

// 6. Marginal-variance identity.
Outcome marginal_variance() {
  Rng rng(6);
  double worst = 0.0;
  int graphs = 0;
  while (graphs < 10) {
    const std::size_t n = 5 + rng.below(46);
    const double p = 0.05 + 0.25 * rng.uniform();
    std::vector<Edge> edges;
    for (NodeId a = 0; a < n; ++a) {
      for (NodeId b = a + 1; b < n; ++b) {
        if (rng.uniform() < p) edges.emplace_back(a, b);
      }
    }
    if (edges.empty()) continue;
    const Graph g = Graph::from_edges(n, edges);
    const EtaRange range = eta_range(g);
    const double eta = 0.9 * (range.lo + (range.hi - range.lo) * rng.uniform());
    const Eigen::VectorXd tau2 = tau_from_eta(g, eta);
    const Eigen::MatrixXd cov = model_covariance(g, eta, tau2);
    worst = std::max(worst, (cov.diagonal().array() - 1.0).abs().maxCoeff());
    ++graphs;
  }
  return {worst <= 1e-10, "max |diag - 1| " + fmt(worst) + " over 10 graphs"};
}

// 7. Rate property.
Outcome rate_property() {
  const ScalingFilter haar = haar_filter();
  const PhiTable table = cascade(haar, kDefaultPhiResolution);
  const RegressionFunction m = [](std::span<const double> x) { return std::abs(x[0] - 0.5); };
  Rng test_rng(70);
  Eigen::MatrixXd test_x(4096, 1);
  for (Eigen::Index i = 0; i < test_x.rows(); ++i) test_x(i, 0) = test_rng.uniform();

  std::vector<double> log_n, log_err, medians;
  for (int e = 8; e <= 14; ++e) {
    const std::size_t n = std::size_t{1} << e;
    const int j = select_level(n, 1, 1.0);
    const WaveletSieve sieve = make_sieve_on_unit_cube(haar, 1, j);
    std::vector<double> errors;
    for (std::uint64_t rep = 0; rep < 20; ++rep) {
      Rng rng(derive_seed(7, {n, rep}));
      Dataset data;
      data.x.resize(static_cast<Eigen::Index>(n), 1);
      data.y.resize(static_cast<Eigen::Index>(n));
      for (Eigen::Index i = 0; i < data.y.size(); ++i) {
        const double x = rng.uniform();
        data.x(i, 0) = x;
        data.y[i] = std::abs(x - 0.5) + 0.5 * rng.normal();
      }
      const RegressionFit f = fit(data, sieve, table, auto_rho(data.y), kDefaultSvdRtol);
      errors.push_back(l2_error_mc(f, table, m, test_x));
    }
    std::nth_element(errors.begin(), errors.begin() + 10, errors.end());
    const double upper = errors[10];
    const double lower = *std::max_element(errors.begin(), errors.begin() + 10);
    const double median = 0.5 * (lower + upper);
    medians.push_back(median);
    log_n.push_back(std::log(static_cast<double>(n)));
    log_err.push_back(std::log(median));
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < medians.size(); ++i) decreasing = decreasing && medians[i] < medians[i - 1];
  const double k = static_cast<double>(log_n.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < log_n.size(); ++i) {
    sx += log_n[i];
    sy += log_err[i];
    sxx += log_n[i] * log_n[i];
    sxy += log_n[i] * log_err[i];
  }
  const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  std::string curve;
  for (double v : medians) curve += (curve.empty() ? "" : " ") + fmt(v);
  return {decreasing && slope >= -0.8 && slope <= -0.4,
          "medians [" + curve + "], slope " + fmt(slope) +
              (decreasing ? "" : ", not strictly decreasing")};
}

// 8. Blocking partition.
Outcome blocking_exhaustive() {
  std::size_t checked = 0;
  std::string problem;
  auto verify = [&](const std::vector<int>& n, int q) {
    const BlockingPartition bp = blocking_partition(n, q);
    const int dim = static_cast<int>(n.size());
    std::size_t expected_points = 1, block_size = 1;
    for (int i = 0; i < dim; ++i) {
      expected_points *= static_cast<std::size_t>(bp.n_star[i]);
      block_size *= static_cast<std::size_t>(q);
      if (bp.n_star[i] < n[i]) problem = "n* does not cover n";
    }
    std::set<LatticePoint> seen;
    for (const auto& cls : bp.blocks) {
      for (const auto& block : cls) {
        if (block.size() != block_size) problem = "block of wrong size";
        for (const auto& p : block) {
          for (int i = 0; i < dim; ++i) {
            if (p[i] < 1 || p[i] > bp.n_star[i]) problem = "point outside I_n*";
          }
          if (!seen.insert(p).second) problem = "point in two blocks";
        }
      }
      for (std::size_t a = 0; a < cls.size(); ++a) {
        for (std::size_t b = a + 1; b < cls.size(); ++b) {
          int dist = std::numeric_limits<int>::max();
          for (const auto& p : cls[a]) {
            for (const auto& r : cls[b]) {
              int d = 0;
              for (int i = 0; i < dim; ++i) d = std::max(d, std::abs(p[i] - r[i]));
              dist = std::min(dist, d);
            }
          }
          if (dist < q) problem = "same-class blocks closer than q";
        }
      }
    }
    if (seen.size() != expected_points) problem = "blocks do not cover I_n*";
    if (bp.blocks.size() != (std::size_t{1} << dim)) problem = "wrong class count";
    if (!problem.empty()) {
      std::ostringstream os;
      os << problem << " at q=" << q << " n=";
      for (int v : n) os << v << ' ';
      problem = os.str();
    }
    ++checked;
  };
  for (int dim = 1; dim <= 3 && problem.empty(); ++dim) {
    for (int q = 1; q <= 3 && problem.empty(); ++q) {
      std::vector<int> n(static_cast<std::size_t>(dim), 2 * q + 1);
      while (problem.empty()) {
        verify(n, q);
        int i = 0;
        while (i < dim && n[i] == 12) n[i++] = 2 * q + 1;
        if (i == dim) break;
        ++n[i];
      }
    }
  }
  return {problem.empty(), problem.empty() ? std::to_string(checked) + " partitions verified" : problem};
}

// 9. Experiment-shape reproduction.
Outcome experiment_shape() {
  const ExperimentConfig cfg = bivariate_preset();
  const ExperimentResult first = run_experiment(cfg);
  const ExperimentResult second = run_experiment(cfg);
  const bool deterministic = table_csv(first.table) == table_csv(second.table);
  std::map<std::string, std::vector<double>> curves;
  for (const auto& row : first.table.rows) curves[row.wavelet].push_back(row.mean_l2);
  bool all_interior = true;
  std::string detail;
  for (const auto& name : cfg.wavelets) {
    const auto& c = curves[name];
    const auto best = std::min_element(c.begin(), c.end()) - c.begin();
    const bool interior = best > 0 && best + 1 < static_cast<long>(c.size());
    all_interior = all_interior && interior;
    detail += name + " [";
    for (std::size_t i = 0; i < c.size(); ++i) detail += (i ? " " : "") + fmt(c[i]);
    detail += "] min at j=" + std::to_string(cfg.levels[static_cast<std::size_t>(best)]) +
              (interior ? " interior; " : " boundary; ");
  }
  detail += deterministic ? "csv deterministic" : "csv differs between runs";
  return {all_interior && deterministic, detail};
}

// 10. Covering bound.
Outcome covering_bound_check() {
  Rng rng(10);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const int v = 2 + static_cast<int>(rng.below(30));
    const double width = 0.1 + 10.0 * rng.uniform();
    const double eps = width / 4.0 * (0.01 + 0.98 * rng.uniform());
    const double p = 1.0 + 3.0 * rng.uniform();
    const double ratio = std::pow(width / eps, p);
    const double expect =
        std::log(3.0) + v * std::log(2.0 * std::numbers::e * ratio *
                                     std::log(3.0 * std::numbers::e * ratio));
    const double got = covering_bound(v, width, eps, p);
    worst = std::max(worst, std::abs(got - expect) / std::max(1.0, std::abs(expect)));
  }
  bool rejects = true;
  for (double eps : {0.25, 0.3, 1.0}) {
    try {
      covering_bound(3, 1.0, eps, 2.0);
      rejects = false;
    } catch (const Error&) {
    }
  }
  return {worst <= 1e-12 && rejects,
          "max error " + fmt(worst) + (rejects ? ", rejects eps >= (b-a)/4" : ", accepted eps >= (b-a)/4")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "filter identities", 1.0, filter_identities},
      {2, "cascade correctness", 5.0, cascade_correctness},
      {3, "least-squares oracle", 5.0, least_squares_oracle},
      {4, "gmrf stationarity", 60.0, gmrf_stationarity},
      {5, "spectral and range checks", 1.0, spectral_checks},
      {6, "marginal-variance identity", 5.0, marginal_variance},
      {7, "rate property", 180.0, rate_property},
      {8, "blocking partition", 30.0, blocking_exhaustive},
      {9, "experiment shape", 600.0, experiment_shape},
      {10, "covering bound", 1.0, covering_bound_check},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.budget_seconds) {
      out.pass = false;
      out.detail += ", over the " + fmt(c.budget_seconds) + " s budget";
    }
    std::printf("%s criterion %d (%s): %s [%.2f s]\n", out.pass ? "PASS" : "FAIL", c.id,
                c.name, out.detail.c_str(), secs);
    std::fflush(stdout);
    if (!out.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
