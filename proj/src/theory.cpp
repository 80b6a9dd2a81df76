#include "wavesieve/theory.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <string>

#include "wavesieve/error.hpp"

namespace wavesieve {

int block_size_q(double sample_size, double c1) {
  require(sample_size >= 2.0, "sample size must be at least 2");
  require(c1 > 0.0, "mixing rate c1 must be positive");
  const double raw = 2.0 * std::log(sample_size) / c1;
  // Relative slack so that exact integers (e.g. 2 log e^2 / 2) stay put.
  return static_cast<int>(std::ceil(raw - 1e-12 * std::max(1.0, raw)));
}

std::size_t BlockingPartition::window_count() const {
  std::size_t total = 1;
  for (int r : windows) total *= static_cast<std::size_t>(r);
  return total;
}

BlockingPartition blocking_partition(std::span<const int> n, int q) {
  require(!n.empty() && n.size() <= 16, "lattice dimension must lie in [1, 16]");
  require(q >= 1, "block side q must be positive");
  for (int ni : n) {
    if (!(2 * q < ni)) {
      fail(ErrorCode::kInvalidArgument,
           "q = " + std::to_string(q) + " too large: need 2q < min n_i");
    }
  }
  BlockingPartition out;
  out.dimension = static_cast<int>(n.size());
  out.q = q;
  out.n.assign(n.begin(), n.end());
  for (int ni : n) {
    const int r = (ni + 2 * q - 1) / (2 * q);
    out.windows.push_back(r);
    out.n_star.push_back(2 * q * r);
  }
  const std::size_t classes = std::size_t{1} << n.size();
  out.blocks.assign(classes,
                    std::vector<std::vector<LatticePoint>>(out.window_count()));

  const auto dim = n.size();
  LatticePoint s(dim, 1);
  while (true) {
    std::size_t l = 0;
    std::size_t u = 0;
    for (std::size_t i = 0; i < dim; ++i) {
      const int offset = s[i] - 1;
      const int window = offset / (2 * q);
      const int half = (offset % (2 * q)) / q;
      l |= static_cast<std::size_t>(half) << i;
      u = u * static_cast<std::size_t>(out.windows[i]) +
          static_cast<std::size_t>(window);
    }
    out.blocks[l][u].push_back(s);

    std::size_t axis = dim;
    bool done = true;
    while (axis > 0) {
      --axis;
      if (++s[axis] <= out.n_star[axis]) {
        done = false;
        break;
      }
      s[axis] = 1;
    }
    if (done) break;
  }
  return out;
}

int sup_distance(const std::vector<LatticePoint>& a,
                 const std::vector<LatticePoint>& b) {
  int best = std::numeric_limits<int>::max();
  for (const auto& p : a) {
    for (const auto& r : b) {
      int dist = 0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        dist = std::max(dist, std::abs(p[i] - r[i]));
      }
      best = std::min(best, dist);
    }
  }
  return best;
}

double covering_bound(int vc_dimension, double range_width, double eps,
                      double p) {
  require(vc_dimension >= 2, "covering bound needs VC dimension >= 2");
  require(range_width > 0.0, "range width must be positive");
  require(p >= 1.0, "covering bound needs p >= 1");
  if (!(eps > 0.0 && eps < range_width / 4.0)) {
    fail(ErrorCode::kInvalidArgument,
         "covering bound needs 0 < eps < (b - a) / 4");
  }
  const double e = std::numbers::e;
  const double ratio = std::pow(range_width / eps, p);
  return std::log(3.0) +
         vc_dimension * std::log(2.0 * e * ratio * std::log(3.0 * e * ratio));
}

std::vector<double> rate_curve(int d, double r, int lattice_dim,
                               std::span<const double> sizes) {
  require(d >= 1, "dimension must be positive");
  require(r > 0.0 && r <= 1.0, "Hoelder exponent must lie in (0, 1]");
  require(lattice_dim >= 1, "lattice dimension must be positive");
  const double exponent = -2.0 * r / (d + 2.0 * r);
  std::vector<double> out;
  out.reserve(sizes.size());
  for (double n : sizes) {
    require(n >= 2.0, "sizes must be at least 2");
    out.push_back(std::pow(std::log(n), lattice_dim + 2) * std::pow(n, exponent));
  }
  return out;
}

void write_curve_csv(std::span<const CurvePoint> points,
                     const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot write curve file " + path.string());
  out << "size,value\n"
      << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& pt : points) out << pt.size << ',' << pt.value << '\n';
  if (!out) fail(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace wavesieve
