#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace wavesieve {

// Block side q = ceil(2 log(sample_size) / c1) used for coupling blocks of
// an exponentially mixing field with rate c1.
int block_size_q(double sample_size, double c1);

using LatticePoint = std::vector<int>;  // 1-based coordinates

// Interlaced partition of I_{n*} = {1..n*_1} x ... x {1..n*_N}, where
// n*_i = 2 q R_i and R_i is the smallest integer with 2q(R_i - 1) < n_i.
// Along each axis the range is cut into R_i windows of length 2q; the first
// and second q-halves of a window carry bit 0 and 1. Class l collects the
// q^N-point blocks whose per-axis bits spell l; u enumerates the windows.
struct BlockingPartition {
  int dimension = 0;
  int q = 0;
  std::vector<int> n;
  std::vector<int> windows;  // R_i
  std::vector<int> n_star;
  // blocks[l][u] for l < 2^N, u < R = prod R_i; points in lexicographic
  // order.
  std::vector<std::vector<std::vector<LatticePoint>>> blocks;

  std::size_t class_count() const { return blocks.size(); }
  std::size_t window_count() const;  // R
};

BlockingPartition blocking_partition(std::span<const int> n, int q);

// Sup-norm distance between two finite point sets.
int sup_distance(const std::vector<LatticePoint>& a,
                 const std::vector<LatticePoint>& b);

// Upper bound on log N(eps, G, L^p) for a class with subgraph VC dimension
// V and range width b - a:
//   log 3 + V log( 2e (b-a)^p / eps^p * log(3e (b-a)^p / eps^p) ).
// Requires V >= 2, 0 < eps < (b-a)/4, p >= 1. An r-dimensional linear space
// has V <= r + 1.
double covering_bound(int vc_dimension, double range_width, double eps,
                      double p);

// Shape-only rate (log n)^{N+2} n^{-2r/(d+2r)} for each size.
std::vector<double> rate_curve(int d, double r, int lattice_dim,
                               std::span<const double> sizes);

struct CurvePoint {
  double size = 0.0;
  double value = 0.0;
};

// CSV with header "size,value".
void write_curve_csv(std::span<const CurvePoint> points,
                     const std::filesystem::path& path);

}  // namespace wavesieve
