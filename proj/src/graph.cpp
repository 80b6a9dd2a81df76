#include "wavesieve/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <queue>
#include <sstream>
#include <string>

#include "wavesieve/error.hpp"
#include "wavesieve/rng.hpp"

namespace wavesieve {

Graph Graph::from_edges(std::size_t node_count, std::vector<Edge> edges) {
  for (auto& e : edges) {
    if (e.first >= node_count || e.second >= node_count) {
      fail(ErrorCode::kInvalidArgument,
           "edge (" + std::to_string(e.first) + ", " +
               std::to_string(e.second) + ") references a node >= " +
               std::to_string(node_count));
    }
    if (e.first == e.second) {
      fail(ErrorCode::kInvalidArgument,
           "self-loop at node " + std::to_string(e.first));
    }
    if (e.first > e.second) std::swap(e.first, e.second);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  Graph g;
  g.adjacency_.assign(node_count, {});
  for (const auto& [u, v] : edges) {
    g.adjacency_[u].push_back(v);
    g.adjacency_[v].push_back(u);
  }
  for (auto& list : g.adjacency_) std::sort(list.begin(), list.end());
  g.edges_ = std::move(edges);
  return g;
}

std::size_t Graph::max_degree() const {
  std::size_t best = 0;
  for (const auto& list : adjacency_) best = std::max(best, list.size());
  return best;
}

bool Graph::adjacent(NodeId s, NodeId t) const {
  const auto& list = adjacency_[s];
  return std::binary_search(list.begin(), list.end(), t);
}

Eigen::MatrixXd Graph::dense_adjacency() const {
  const auto n = static_cast<Eigen::Index>(node_count());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [u, v] : edges_) {
    h(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) = 1.0;
    h(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(u)) = 1.0;
  }
  return h;
}

Eigen::VectorXd Graph::multiply(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y(x.size());
  for (std::size_t s = 0; s < adjacency_.size(); ++s) {
    double acc = 0.0;
    for (NodeId t : adjacency_[s]) acc += x[static_cast<Eigen::Index>(t)];
    y[static_cast<Eigen::Index>(s)] = acc;
  }
  return y;
}

bool Graph::is_connected() const {
  std::vector<NodeId> all(node_count());
  std::iota(all.begin(), all.end(), NodeId{0});
  return is_connected(all);
}

bool Graph::is_connected(std::span<const NodeId> subset) const {
  if (subset.empty()) return true;
  std::vector<char> inside(node_count(), 0);
  for (NodeId s : subset) inside[s] = 1;
  std::vector<char> seen(node_count(), 0);
  std::vector<NodeId> stack{subset.front()};
  seen[subset.front()] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const NodeId s = stack.back();
    stack.pop_back();
    for (NodeId t : adjacency_[s]) {
      if (inside[t] && !seen[t]) {
        seen[t] = 1;
        ++reached;
        stack.push_back(t);
      }
    }
  }
  std::size_t distinct = 0;
  for (char c : inside) distinct += c ? 1 : 0;
  return reached == distinct;
}

std::size_t LatticeIndexSet::size() const {
  std::size_t total = 1;
  for (int ni : n) total *= static_cast<std::size_t>(ni);
  return total;
}

std::vector<std::vector<int>> LatticeIndexSet::members() const {
  for (int ni : n) require(ni >= 1, "lattice sides must be positive");
  std::vector<std::vector<int>> out;
  out.reserve(size());
  std::vector<int> s(n.size(), 1);
  if (n.empty()) return out;
  while (true) {
    out.push_back(s);
    std::size_t axis = n.size();
    while (axis > 0) {
      --axis;
      if (++s[axis] <= n[axis]) break;
      s[axis] = 1;
      if (axis == 0) return out;
    }
  }
}

Graph parse_graph(std::string_view text) {
  std::vector<std::pair<long long, long long>> raw;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream fields(line);
    std::string a, b, extra;
    if (!(fields >> a)) continue;
    auto parse_id = [&](const std::string& token) -> long long {
      std::size_t used = 0;
      long long value = -1;
      try {
        value = std::stoll(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != token.size() || value < 0) {
        fail(ErrorCode::kParse, "line " + std::to_string(line_no) +
                                    ": invalid node id '" + token + "'");
      }
      return value;
    };
    if (!(fields >> b) || (fields >> extra)) {
      fail(ErrorCode::kParse, "line " + std::to_string(line_no) +
                                  ": expected exactly two node ids");
    }
    const long long u = parse_id(a);
    const long long v = parse_id(b);
    if (u == v) {
      fail(ErrorCode::kParse, "line " + std::to_string(line_no) +
                                  ": self-loop at node " + std::to_string(u));
    }
    raw.emplace_back(u, v);
  }

  std::map<long long, NodeId> compact;
  for (const auto& [u, v] : raw) {
    compact.emplace(u, 0);
    compact.emplace(v, 0);
  }
  NodeId next = 0;
  for (auto& [id, mapped] : compact) mapped = next++;
  std::vector<Edge> edges;
  edges.reserve(raw.size());
  for (const auto& [u, v] : raw) edges.emplace_back(compact[u], compact[v]);
  return Graph::from_edges(compact.size(), std::move(edges));
}

Graph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open graph file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_graph(buffer.str());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void save_graph(const Graph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot write graph file " + path.string());
  out << "# nodes " << g.node_count() << " edges " << g.edge_count() << '\n';
  for (const auto& [u, v] : g.edges()) out << u << ' ' << v << '\n';
  if (!out) fail(ErrorCode::kIo, "write failed for " + path.string());
}

Graph torus_lattice(int rows, int cols) {
  require(rows >= 2 && cols >= 2, "torus sides must be at least 2");
  std::vector<Edge> edges;
  auto id = [cols](int r, int c) {
    return static_cast<NodeId>(r) * static_cast<NodeId>(cols) +
           static_cast<NodeId>(c);
  };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      edges.emplace_back(id(r, c), id((r + 1) % rows, c));
      edges.emplace_back(id(r, c), id(r, (c + 1) % cols));
    }
  }
  return Graph::from_edges(static_cast<std::size_t>(rows) * cols,
                           std::move(edges));
}

Graph path_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (std::size_t s = 0; s + 1 < n; ++s) edges.emplace_back(s, s + 1);
  return Graph::from_edges(n, std::move(edges));
}

Graph complete_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = s + 1; t < n; ++t) edges.emplace_back(s, t);
  }
  return Graph::from_edges(n, std::move(edges));
}

Graph knn_geometric_graph(std::size_t points, std::size_t k,
                          std::uint64_t seed) {
  require(k < points, "knn graph needs k < points");
  Rng rng(seed);
  std::vector<double> x(points), y(points);
  for (std::size_t i = 0; i < points; ++i) {
    x[i] = rng.uniform();
    y[i] = rng.uniform();
  }
  std::vector<Edge> edges;
  edges.reserve(points * k);
  std::vector<std::pair<double, NodeId>> dist;
  for (std::size_t i = 0; i < points; ++i) {
    dist.clear();
    for (std::size_t j = 0; j < points; ++j) {
      if (j == i) continue;
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      dist.emplace_back(dx * dx + dy * dy, j);
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<long>(k),
                      dist.end());
    for (std::size_t m = 0; m < k; ++m) edges.emplace_back(i, dist[m].second);
  }
  return Graph::from_edges(points, std::move(edges));
}

Graph add_random_chords(const Graph& g, std::size_t count, std::uint64_t seed) {
  const std::size_t n = g.node_count();
  const std::size_t possible = n < 2 ? 0 : n * (n - 1) / 2;
  require(g.edge_count() + count <= possible,
          "not enough non-edges for " + std::to_string(count) + " chords");
  Rng rng(seed);
  std::vector<Edge> edges = g.edges();
  std::vector<std::vector<NodeId>> added(n);
  std::size_t placed = 0;
  while (placed < count) {
    NodeId u = rng.below(n);
    NodeId v = rng.below(n);
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    if (g.adjacent(u, v)) continue;
    if (std::find(added[u].begin(), added[u].end(), v) != added[u].end()) {
      continue;
    }
    added[u].push_back(v);
    edges.emplace_back(u, v);
    ++placed;
  }
  return Graph::from_edges(n, std::move(edges));
}

namespace {

struct PowerResult {
  double lambda = 0.0;
  std::size_t iterations = 0;
};

// Dominant eigenvalue of the PSD operator x -> apply(x) by power iteration
// with a Rayleigh-quotient estimate.
template <typename Apply>
PowerResult dominant_eigenvalue(std::size_t n, Apply apply, double tol,
                                std::size_t max_iterations,
                                std::uint64_t start_seed) {
  Rng rng(start_seed);
  Eigen::VectorXd x(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = 0.5 + rng.uniform();
  x.normalize();
  for (std::size_t it = 1; it <= max_iterations; ++it) {
    Eigen::VectorXd y = apply(x);
    const double lambda = x.dot(y);
    const double residual = (y - lambda * x).norm();
    if (residual < tol * std::max(1.0, std::abs(lambda))) {
      return {lambda, it};
    }
    const double norm = y.norm();
    if (norm == 0.0) return {0.0, it};
    x = y / norm;
  }
  fail(ErrorCode::kNotConverged,
       "power iteration did not converge after " +
           std::to_string(max_iterations) + " iterations");
}

}  // namespace

EigenBounds eigen_bounds(const Graph& g, double tol,
                         std::size_t max_iterations) {
  require(g.edge_count() >= 1, "eigen bounds need a graph with an edge");
  require(tol > 0.0, "eigen tolerance must be positive");
  const double shift = static_cast<double>(g.max_degree());
  const std::size_t n = g.node_count();

  const PowerResult top = dominant_eigenvalue(
      n, [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        return g.multiply(x) + shift * x;
      },
      tol, max_iterations, 0x5eed0001ULL);
  const double hm = top.lambda - shift;

  const PowerResult bottom = dominant_eigenvalue(
      n, [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        return hm * x - g.multiply(x);
      },
      tol, max_iterations, 0x5eed0002ULL);
  const double h0 = hm - bottom.lambda;

  return {h0, hm, top.iterations + bottom.iterations};
}

EtaRange eta_range(const EigenBounds& bounds) {
  if (!(bounds.h0 < 0.0) || !(bounds.hm > 0.0)) {
    fail(ErrorCode::kInvalidArgument,
         "eta range undefined: need h0 < 0 < hm (h0 = " +
             std::to_string(bounds.h0) + ", hm = " +
             std::to_string(bounds.hm) + ")");
  }
  return {1.0 / bounds.h0, 1.0 / bounds.hm};
}

EtaRange eta_range(const Graph& g, double tol) {
  return eta_range(eigen_bounds(g, tol));
}

bool ConcliquePartition::valid_for(const Graph& g) const {
  if (label.size() != g.node_count()) return false;
  std::vector<char> covered(g.node_count(), 0);
  for (std::size_t c = 0; c < classes.size(); ++c) {
    for (NodeId s : classes[c]) {
      if (s >= g.node_count() || covered[s] || label[s] != c) return false;
      covered[s] = 1;
      for (NodeId t : g.neighbors(s)) {
        if (label[t] == c) return false;
      }
    }
  }
  return std::all_of(covered.begin(), covered.end(),
                     [](char c) { return c != 0; });
}

ConcliquePartition concliques(const Graph& g) {
  const std::size_t n = g.node_count();
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    return g.degree(a) > g.degree(b);
  });

  constexpr std::size_t kUncoloured = static_cast<std::size_t>(-1);
  ConcliquePartition out;
  out.label.assign(n, kUncoloured);
  std::vector<std::size_t> used_by;  // used_by[c] == s marks colour c taken
  for (NodeId s : order) {
    used_by.assign(g.degree(s) + 1, kUncoloured);
    for (NodeId t : g.neighbors(s)) {
      const std::size_t c = out.label[t];
      if (c != kUncoloured && c < used_by.size()) used_by[c] = s;
    }
    std::size_t colour = 0;
    while (used_by[colour] == s) ++colour;
    out.label[s] = colour;
    if (colour >= out.classes.size()) out.classes.resize(colour + 1);
  }
  for (NodeId s = 0; s < n; ++s) out.classes[out.label[s]].push_back(s);
  return out;
}

Split connected_split(const Graph& g, double test_fraction,
                      std::uint64_t seed) {
  require(test_fraction > 0.0 && test_fraction < 1.0,
          "test fraction must lie in (0, 1)");
  const std::size_t n = g.node_count();
  require(n >= 2, "split needs at least two nodes");
  require(g.is_connected(), "split needs a connected graph");

  // The small slack keeps e.g. 0.3 * 10 from rounding up to 4.
  auto target = static_cast<std::size_t>(
      std::ceil(test_fraction * static_cast<double>(n) - 1e-9));
  target = std::clamp<std::size_t>(target, 1, n - 1);

  Rng rng(seed);
  const NodeId start = rng.below(n);
  std::vector<char> taken(n, 0);
  std::vector<NodeId> test;
  std::queue<NodeId> frontier;
  frontier.push(start);
  taken[start] = 1;
  while (!frontier.empty() && test.size() < target) {
    const NodeId s = frontier.front();
    frontier.pop();
    test.push_back(s);
    for (NodeId t : g.neighbors(s)) {
      if (!taken[t]) {
        taken[t] = 1;
        frontier.push(t);
      }
    }
  }

  Split split;
  std::vector<char> in_test(n, 0);
  for (NodeId s : test) in_test[s] = 1;
  for (NodeId s = 0; s < n; ++s) {
    (in_test[s] ? split.test : split.learn).push_back(s);
  }
  split.learn_connected = g.is_connected(split.learn);
  return split;
}

}  // namespace wavesieve
