#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace wavesieve {

using NodeId = std::size_t;
using Edge = std::pair<NodeId, NodeId>;

// Undirected simple graph, immutable after construction. Edges are stored
// once with first < second, sorted; adjacency lists are sorted ascending.
class Graph {
 public:
  Graph() = default;

  // Validates ids (< node_count), rejects self-loops and collapses duplicate
  // and reversed edges.
  static Graph from_edges(std::size_t node_count, std::vector<Edge> edges);

  std::size_t node_count() const { return adjacency_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }

  std::span<const NodeId> neighbors(NodeId s) const { return adjacency_[s]; }
  std::size_t degree(NodeId s) const { return adjacency_[s].size(); }
  std::size_t max_degree() const;
  bool adjacent(NodeId s, NodeId t) const;

  // Dense 0/1 adjacency matrix H.
  Eigen::MatrixXd dense_adjacency() const;

  // y = H x without forming H.
  Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;

  // True when every node is reachable from node 0 (vacuously true when the
  // graph is empty). `subset` restricts the check to an induced subgraph.
  bool is_connected() const;
  bool is_connected(std::span<const NodeId> subset) const;

 private:
  std::vector<Edge> edges_;
  std::vector<std::vector<NodeId>> adjacency_;
};

// Box {s in Z^N : 1 <= s <= n} of a regular lattice.
struct LatticeIndexSet {
  std::vector<int> n;

  std::size_t dimension() const { return n.size(); }
  std::size_t size() const;
  // All members in lexicographic order, 1-based coordinates.
  std::vector<std::vector<int>> members() const;
};

// Edge-list I/O: one "u v" pair per line, '#' starts a comment. Node ids are
// compacted to 0..n-1 in ascending order of the ids seen in the file.
Graph load_graph(const std::filesystem::path& path);
Graph parse_graph(std::string_view text);
void save_graph(const Graph& g, const std::filesystem::path& path);

// 4-nearest-neighbour lattice with periodic boundary; node (r, c) has id
// r * cols + c.
Graph torus_lattice(int rows, int cols);
Graph path_graph(std::size_t n);
Graph complete_graph(std::size_t n);

// Uniform points in the unit square, each joined to its k nearest
// neighbours; the relation is symmetrized.
Graph knn_geometric_graph(std::size_t points, std::size_t k,
                          std::uint64_t seed);

// Adds `count` distinct chords drawn uniformly from the non-edges.
Graph add_random_chords(const Graph& g, std::size_t count, std::uint64_t seed);

struct EigenBounds {
  double h0 = 0.0;  // smallest adjacency eigenvalue
  double hm = 0.0;  // largest adjacency eigenvalue
  std::size_t iterations = 0;
};

inline constexpr double kDefaultEigenTol = 1e-8;
inline constexpr std::size_t kDefaultEigenMaxIter = 100000;

// Power iteration on H + Δ·I for hm, then on hm·I - H for h0 (Δ = max
// degree, so both iterated operators are positive semidefinite). Converged
// when the eigen-residual ||Bx - λx|| drops below tol·max(1, |λ|).
EigenBounds eigen_bounds(const Graph& g, double tol = kDefaultEigenTol,
                         std::size_t max_iterations = kDefaultEigenMaxIter);

struct EtaRange {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double eta) const { return lo < eta && eta < hi; }
};

// Admissible dependence parameters (1/h0, 1/hm) for which I - ηH is
// invertible.
EtaRange eta_range(const Graph& g, double tol = kDefaultEigenTol);
EtaRange eta_range(const EigenBounds& bounds);

// Independent sets covering the graph. classes[c] is sorted ascending;
// label[s] is the class of node s.
struct ConcliquePartition {
  std::vector<std::vector<NodeId>> classes;
  std::vector<std::size_t> label;

  bool valid_for(const Graph& g) const;
};

// Greedy colouring in descending-degree order (ties by ascending id).
ConcliquePartition concliques(const Graph& g);

struct Split {
  std::vector<NodeId> learn;  // V_L, sorted
  std::vector<NodeId> test;   // V_T, sorted and connected
  bool learn_connected = false;
};

// Grows V_T breadth-first from a seeded start node until it holds
// ceil(test_fraction * |V|) nodes.
Split connected_split(const Graph& g, double test_fraction, std::uint64_t seed);

}  // namespace wavesieve
