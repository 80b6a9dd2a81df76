#include "wavesieve/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

#include <Eigen/Dense>

#include "wavesieve/error.hpp"

namespace wavesieve {

ScalingFilter make_filter(std::string name, std::vector<double> h) {
  require(h.size() >= 2, "scaling filter needs at least two taps");
  ScalingFilter f;
  f.name = std::move(name);
  const std::size_t len = h.size();
  f.g.resize(len);
  for (std::size_t l = 0; l < len; ++l) {
    const double sign = (l % 2 == 0) ? 1.0 : -1.0;
    f.g[l] = sign * h[len - 1 - l];
  }
  f.h = std::move(h);
  return f;
}

ScalingFilter haar_filter() {
  const double c = 1.0 / std::sqrt(2.0);
  return make_filter("haar", {c, c});
}

ScalingFilter d4_filter() {
  const double s3 = std::sqrt(3.0);
  const double denom = 4.0 * std::sqrt(2.0);
  return make_filter("d4", {(1.0 + s3) / denom, (3.0 + s3) / denom,
                            (3.0 - s3) / denom, (1.0 - s3) / denom});
}

ScalingFilter filter_by_name(const std::string& name) {
  if (name == "haar") return haar_filter();
  if (name == "d4" || name == "db2") return d4_filter();
  fail(ErrorCode::kInvalidArgument, "unknown wavelet '" + name + "'");
}

namespace {

double shifted_dot(const std::vector<double>& a, const std::vector<double>& b,
                   int shift) {
  double acc = 0.0;
  const int len = static_cast<int>(a.size());
  for (int l = 0; l < len; ++l) {
    const int m = l + shift;
    if (m >= 0 && m < static_cast<int>(b.size())) acc += a[l] * b[m];
  }
  return acc;
}

}  // namespace

double filter_identity_residual(const ScalingFilter& f) {
  double sum = 0.0;
  for (double v : f.h) sum += v;
  double worst = std::abs(sum - std::sqrt(2.0));
  const int span = static_cast<int>(f.length());
  for (int z = -span; z <= span; ++z) {
    const double delta = (z == 0) ? 1.0 : 0.0;
    worst = std::max(worst, std::abs(shifted_dot(f.h, f.h, 2 * z) - delta));
    worst = std::max(worst, std::abs(shifted_dot(f.g, f.g, 2 * z) - delta));
    worst = std::max(worst, std::abs(shifted_dot(f.g, f.h, 2 * z)));
  }
  return worst;
}

PhiTable::PhiTable(std::string filter_name, int resolution, int support_width,
                   std::vector<double> values, Interpolation mode)
    : filter_name_(std::move(filter_name)),
      resolution_(resolution),
      step_(std::ldexp(1.0, -resolution)),
      support_width_(support_width),
      values_(std::move(values)),
      mode_(mode) {
  const auto expected =
      (static_cast<std::size_t>(support_width) << resolution) + 1;
  require(values_.size() == expected, "phi table has the wrong length");
}

double PhiTable::operator()(double x) const {
  if (!(x >= 0.0) || x > static_cast<double>(support_width_)) return 0.0;
  const double pos = std::ldexp(x, resolution_);
  const auto k = static_cast<std::size_t>(pos);
  if (k + 1 >= values_.size()) return values_.back();
  if (mode_ == Interpolation::kStep) return values_[k];
  const double frac = pos - static_cast<double>(k);
  return values_[k] + frac * (values_[k + 1] - values_[k]);
}

void PhiTable::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot write phi table " + path.string());
  out << "x,phi\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t k = 0; k < values_.size(); ++k) {
    out << static_cast<double>(k) * step_ << ',' << values_[k] << '\n';
  }
  if (!out) fail(ErrorCode::kIo, "write failed for " + path.string());
}

PhiTable cascade(const ScalingFilter& filter, int r) {
  require(r >= 1 && r <= 24, "cascade resolution must lie in [1, 24]");
  const int len = static_cast<int>(filter.length());
  const int width = len - 1;
  const double root2 = std::sqrt(2.0);

  std::vector<double> at_integers(static_cast<std::size_t>(len), 0.0);
  if (len == 2) {
    at_integers[0] = 1.0;
  } else {
    const int interior = len - 2;
    Eigen::MatrixXd refine = Eigen::MatrixXd::Zero(interior, interior);
    for (int a = 0; a < interior; ++a) {
      for (int b = 0; b < interior; ++b) {
        const int idx = 2 * (a + 1) - (b + 1);
        if (idx >= 0 && idx < len) refine(a, b) = root2 * filter.h[idx];
      }
    }
    refine -= Eigen::MatrixXd::Identity(interior, interior);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(refine);
    lu.setThreshold(1e-10);
    const Eigen::MatrixXd kernel = lu.kernel();
    if (lu.rank() != interior - 1 || kernel.cols() != 1) {
      fail(ErrorCode::kNumerical,
           "refinement matrix of '" + filter.name +
               "' has no simple eigenvalue 1");
    }
    const double total = kernel.col(0).sum();
    if (std::abs(total) < 1e-12) {
      fail(ErrorCode::kNumerical,
           "refinement eigenvector of '" + filter.name + "' sums to zero");
    }
    for (int a = 0; a < interior; ++a) at_integers[a + 1] = kernel(a, 0) / total;
  }

  const std::size_t scale = std::size_t{1} << r;
  std::vector<double> values(static_cast<std::size_t>(width) * scale + 1, 0.0);
  for (int n = 0; n < len; ++n) values[static_cast<std::size_t>(n) * scale] = at_integers[n];

  for (int level = 1; level <= r; ++level) {
    const std::size_t stride = scale >> level;  // grid spacing at this level
    for (std::size_t idx = stride; idx < values.size(); idx += 2 * stride) {
      double acc = 0.0;
      for (int l = 0; l < len; ++l) {
        const long long src = 2LL * static_cast<long long>(idx) -
                              static_cast<long long>(l) * static_cast<long long>(scale);
        if (src >= 0 && src < static_cast<long long>(values.size())) {
          acc += filter.h[l] * values[static_cast<std::size_t>(src)];
        }
      }
      values[idx] = root2 * acc;
    }
  }
  const auto mode = (len == 2) ? PhiTable::Interpolation::kStep
                               : PhiTable::Interpolation::kLinear;
  return PhiTable(filter.name, r, width, std::move(values), mode);
}

std::vector<Translation> translation_set(int w, int d) {
  require(w >= 0, "translation width must be non-negative");
  require(d >= 1, "dimension must be positive");
  std::vector<Translation> out;
  Translation gamma(static_cast<std::size_t>(d), -w);
  while (true) {
    out.push_back(gamma);
    int axis = d - 1;
    while (axis >= 0 && gamma[axis] == w) {
      gamma[axis] = -w;
      --axis;
    }
    if (axis < 0) break;
    ++gamma[axis];
  }
  return out;
}

namespace {

bool support_meets(const Translation& gamma, const Box& box, int j,
                   int support_width) {
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    const double left = std::ldexp(static_cast<double>(gamma[i]), -j);
    const double right =
        std::ldexp(static_cast<double>(gamma[i] + support_width), -j);
    if (!(left < box.hi[i] && right > box.lo[i])) return false;
  }
  return true;
}

void check_box(const Box& box, int d) {
  require(box.lo.size() == static_cast<std::size_t>(d) &&
              box.hi.size() == static_cast<std::size_t>(d),
          "box dimension mismatch");
  for (int i = 0; i < d; ++i) require(box.lo[i] <= box.hi[i], "empty box");
}

}  // namespace

std::vector<Translation> translation_set(int w, int d, const Box& prune_to,
                                         int j, int support_width) {
  check_box(prune_to, d);
  std::vector<Translation> out;
  for (auto& gamma : translation_set(w, d)) {
    if (support_meets(gamma, prune_to, j, support_width)) {
      out.push_back(std::move(gamma));
    }
  }
  return out;
}

int covering_width(const Box& domain, int j, int support_width) {
  int w = 0;
  for (std::size_t i = 0; i < domain.lo.size(); ++i) {
    const double lo = std::floor(std::ldexp(domain.lo[i], j)) - support_width;
    const double hi = std::ceil(std::ldexp(domain.hi[i], j));
    w = std::max({w, static_cast<int>(std::abs(lo)), static_cast<int>(std::abs(hi))});
  }
  return w;
}

WaveletSieve make_sieve(const ScalingFilter& filter, int d, int j,
                        const Box& domain, bool prune) {
  require(d >= 1, "dimension must be positive");
  check_box(domain, d);
  WaveletSieve sieve;
  sieve.filter = filter;
  sieve.d = d;
  sieve.j = j;
  sieve.w = covering_width(domain, j, filter.support_width());
  sieve.translations =
      prune ? translation_set(sieve.w, d, domain, j, filter.support_width())
            : translation_set(sieve.w, d);
  return sieve;
}

WaveletSieve make_sieve_on_unit_cube(const ScalingFilter& filter, int d, int j,
                                     bool prune) {
  Box unit{std::vector<double>(static_cast<std::size_t>(d), 0.0),
           std::vector<double>(static_cast<std::size_t>(d), 1.0)};
  return make_sieve(filter, d, j, unit, prune);
}

double phi_eval(const WaveletSieve& sieve, const PhiTable& table,
                std::span<const int> gamma, std::span<const double> x) {
  double value = 1.0;
  for (int i = 0; i < sieve.d; ++i) {
    const double arg = std::ldexp(x[i], sieve.j) - gamma[i];
    const double factor = table(arg);
    if (factor == 0.0) return 0.0;
    value *= factor;
  }
  // 2^{jd/2}
  return value * std::pow(2.0, 0.5 * sieve.j * sieve.d);
}

TensorCoefficients::TensorCoefficients(const ScalingFilter& filter, int d)
    : d_(d) {
  require(d >= 1 && d <= 16, "dimension must lie in [1, 16]");
  const double root2 = std::sqrt(2.0);
  for (double v : filter.h) a0_.push_back(root2 * v);
  for (double v : filter.g) a1_.push_back(root2 * v);
}

double TensorCoefficients::operator()(std::size_t k,
                                      std::span<const int> gamma) const {
  double value = 1.0;
  const int len = static_cast<int>(a0_.size());
  for (int i = 0; i < d_; ++i) {
    const int g = gamma[i];
    if (g < 0 || g >= len) return 0.0;
    value *= ((k >> i) & 1U) ? a1_[g] : a0_[g];
  }
  return value;
}

double TensorCoefficients::sum(std::size_t k) const {
  double total = 1.0;
  for (int i = 0; i < d_; ++i) {
    double axis = 0.0;
    for (double v : ((k >> i) & 1U) ? a1_ : a0_) axis += v;
    total *= axis;
  }
  return total;
}

TensorCoefficients mother_tensor_coeffs(const ScalingFilter& filter, int d) {
  return TensorCoefficients(filter, d);
}

}  // namespace wavesieve
