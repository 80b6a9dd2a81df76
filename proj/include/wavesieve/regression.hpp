#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "wavesieve/wavelet.hpp"

namespace wavesieve {

// Observations (X(s), Y(s)); row s of `x` is the design point in R^d.
struct Dataset {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;

  int dimension() const { return static_cast<int>(x.cols()); }
  std::size_t size() const { return static_cast<std::size_t>(x.rows()); }
  void validate() const;
  // Rows selected by `rows`, in that order.
  Dataset subset(std::span<const std::size_t> rows) const;
};

// CSV with columns x_1,...,x_d,y. A first line that does not parse as
// numbers is treated as a header.
Dataset read_dataset_csv(const std::filesystem::path& path);
void write_dataset_csv(const Dataset& data, const std::filesystem::path& path);

// Entry (s, c) = Phi_{j, gamma_c}(X(s)), columns in sieve order.
Eigen::MatrixXd design_matrix(const Eigen::MatrixXd& x,
                              const WaveletSieve& sieve, const PhiTable& table);

struct SvdReport {
  std::size_t rank = 0;
  double condition_number = 0.0;  // largest / smallest retained value
  std::vector<double> singular_values;
  std::vector<double> dropped;
  bool degenerate = false;  // every singular value was dropped
};

inline constexpr double kDefaultSvdRtol = 1e-10;
inline constexpr double kNoTruncation = std::numeric_limits<double>::infinity();

struct RegressionFit {
  WaveletSieve sieve;
  Eigen::VectorXd coeffs;  // one per sieve translation
  double rho = kNoTruncation;
  SvdReport svd;
};

// Minimum-norm least squares via the SVD of the design matrix; singular
// values below svd_rtol * sigma_max are treated as zero.
RegressionFit fit(const Dataset& data, const WaveletSieve& sieve,
                  const PhiTable& table, double rho,
                  double svd_rtol = kDefaultSvdRtol);

// Minimum-norm solution of min ||a x - b|| from a thin SVD.
Eigen::VectorXd svd_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                          double rtol, SvdReport* report = nullptr);

// T_L y = max(min(y, L), -L).
double truncate_value(double y, double bound);

// Untruncated sieve value sum_gamma a_gamma Phi_{j,gamma}(x).
double evaluate_raw(const RegressionFit& fit, const PhiTable& table,
                    std::span<const double> x);
// T_rho of the raw value.
double predict(const RegressionFit& fit, const PhiTable& table,
               std::span<const double> x);

// rho_n = c log(sample_size).
double default_rho(double sample_size, double c);

// Truncation used when none is configured: c = max(1, 2 max|Y| / log n),
// so rho = max(log n, 2 max|Y|) and the bound rarely binds on well-scaled
// data.
double auto_truncation_constant(const Eigen::VectorXd& y);
double auto_rho(const Eigen::VectorXd& y);

// The j with 2^j <= n^{1/(d+2r)} < 2^{j+1}.
int select_level(std::size_t sample_size, int d, double r);

using RegressionFunction = std::function<double(std::span<const double>)>;

// Mean squared deviation of predict() from m_true over the rows of test_x.
double l2_error_mc(const RegressionFit& fit, const PhiTable& table,
                   const RegressionFunction& m_true,
                   const Eigen::MatrixXd& test_x);

nlohmann::json fit_to_json(const RegressionFit& fit);
RegressionFit fit_from_json(const nlohmann::json& doc);

}  // namespace wavesieve
