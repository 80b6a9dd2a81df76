#include "wavesieve/regression.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "wavesieve/error.hpp"

namespace wavesieve {

void Dataset::validate() const {
  require(x.rows() == y.size(), "dataset X and Y differ in length");
  require(x.cols() >= 1, "dataset needs at least one design column");
  require(x.allFinite() && y.allFinite(), "dataset contains non-finite values");
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.x.resize(static_cast<Eigen::Index>(rows.size()), x.cols());
  out.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = static_cast<Eigen::Index>(rows[i]);
    require(src < x.rows(), "subset row out of range");
    out.x.row(static_cast<Eigen::Index>(i)) = x.row(src);
    out.y[static_cast<Eigen::Index>(i)] = y[src];
  }
  return out;
}

namespace {

bool parse_row(const std::string& line, std::vector<double>& out) {
  out.clear();
  std::stringstream fields(line);
  std::string cell;
  while (std::getline(fields, cell, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(cell, &used);
    } catch (const std::exception&) {
      return false;
    }
    while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) {
      ++used;
    }
    if (used != cell.size()) return false;
    out.push_back(v);
  }
  return !out.empty();
}

}  // namespace

Dataset read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open dataset " + path.string());
  std::vector<std::vector<double>> rows;
  std::vector<double> row;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (!parse_row(line, row)) {
      if (rows.empty() && line_no == 1) continue;  // header
      fail(ErrorCode::kParse, path.string() + ": line " +
                                  std::to_string(line_no) + ": not numeric");
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      fail(ErrorCode::kParse, path.string() + ": line " +
                                  std::to_string(line_no) +
                                  ": inconsistent column count");
    }
    rows.push_back(row);
  }
  if (rows.empty()) fail(ErrorCode::kParse, path.string() + ": no data rows");
  const auto cols = static_cast<Eigen::Index>(rows.front().size());
  if (cols < 2) {
    fail(ErrorCode::kParse, path.string() + ": need at least x_1 and y");
  }
  Dataset data;
  data.x.resize(static_cast<Eigen::Index>(rows.size()), cols - 1);
  data.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t s = 0; s < rows.size(); ++s) {
    const auto r = static_cast<Eigen::Index>(s);
    for (Eigen::Index c = 0; c + 1 < cols; ++c) data.x(r, c) = rows[s][c];
    data.y[r] = rows[s][static_cast<std::size_t>(cols - 1)];
  }
  data.validate();
  return data;
}

void write_dataset_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot write dataset " + path.string());
  for (int c = 0; c < data.dimension(); ++c) out << "x_" << (c + 1) << ',';
  out << "y\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index r = 0; r < data.x.rows(); ++r) {
    for (Eigen::Index c = 0; c < data.x.cols(); ++c) out << data.x(r, c) << ',';
    out << data.y[r] << '\n';
  }
  if (!out) fail(ErrorCode::kIo, "write failed for " + path.string());
}

Eigen::MatrixXd design_matrix(const Eigen::MatrixXd& x,
                              const WaveletSieve& sieve,
                              const PhiTable& table) {
  if (x.cols() != sieve.d) {
    fail(ErrorCode::kInvalidArgument,
         "data dimension " + std::to_string(x.cols()) +
             " does not match sieve dimension " + std::to_string(sieve.d));
  }
  const auto cols = static_cast<Eigen::Index>(sieve.size());
  Eigen::MatrixXd design(x.rows(), cols);
  std::vector<double> point(static_cast<std::size_t>(sieve.d));
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (int i = 0; i < sieve.d; ++i) point[i] = x(r, i);
    for (Eigen::Index c = 0; c < cols; ++c) {
      design(r, c) = phi_eval(sieve, table,
                              sieve.translations[static_cast<std::size_t>(c)],
                              point);
    }
  }
  return design;
}

Eigen::VectorXd svd_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                          double rtol, SvdReport* report) {
  require(a.rows() == b.size(), "least-squares system size mismatch");
  require(rtol >= 0.0, "svd tolerance must be non-negative");
  Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(a.cols());
  SvdReport local;
  if (a.size() == 0) {
    local.degenerate = true;
    if (report) *report = std::move(local);
    return coeffs;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  const double sigma_max = sigma.size() > 0 ? sigma[0] : 0.0;
  const double cutoff = rtol * sigma_max;
  double smallest_kept = 0.0;
  const Eigen::VectorXd utb = svd.matrixU().transpose() * b;
  Eigen::VectorXd scaled = Eigen::VectorXd::Zero(sigma.size());
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    local.singular_values.push_back(sigma[i]);
    if (sigma[i] > cutoff && sigma[i] > 0.0) {
      scaled[i] = utb[i] / sigma[i];
      smallest_kept = sigma[i];
      ++local.rank;
    } else {
      local.dropped.push_back(sigma[i]);
    }
  }
  if (local.rank == 0) {
    local.degenerate = true;
  } else {
    coeffs = svd.matrixV() * scaled;
    local.condition_number = sigma_max / smallest_kept;
  }
  if (report) *report = std::move(local);
  return coeffs;
}

RegressionFit fit(const Dataset& data, const WaveletSieve& sieve,
                  const PhiTable& table, double rho, double svd_rtol) {
  data.validate();
  require(data.size() >= 1, "fit needs at least one observation");
  require(rho >= 0.0, "truncation bound must be non-negative");
  RegressionFit out;
  out.sieve = sieve;
  out.rho = rho;
  const Eigen::MatrixXd design = design_matrix(data.x, sieve, table);
  out.coeffs = svd_solve(design, data.y, svd_rtol, &out.svd);
  return out;
}

double truncate_value(double y, double bound) {
  return std::max(std::min(y, bound), -bound);
}

double evaluate_raw(const RegressionFit& fit, const PhiTable& table,
                    std::span<const double> x) {
  require(x.size() == static_cast<std::size_t>(fit.sieve.d),
          "point dimension does not match the fit");
  double acc = 0.0;
  for (std::size_t c = 0; c < fit.sieve.size(); ++c) {
    const double a = fit.coeffs[static_cast<Eigen::Index>(c)];
    if (a == 0.0) continue;
    acc += a * phi_eval(fit.sieve, table, fit.sieve.translations[c], x);
  }
  return acc;
}

double predict(const RegressionFit& fit, const PhiTable& table,
               std::span<const double> x) {
  return truncate_value(evaluate_raw(fit, table, x), fit.rho);
}

double default_rho(double sample_size, double c) {
  require(sample_size >= 2.0, "sample size must be at least 2");
  require(c > 0.0, "truncation constant must be positive");
  return c * std::log(sample_size);
}

double auto_truncation_constant(const Eigen::VectorXd& y) {
  const auto n = static_cast<std::size_t>(y.size());
  require(n >= 2, "sample size must be at least 2");
  const double log_n = std::log(static_cast<double>(n));
  const double max_abs = y.cwiseAbs().maxCoeff();
  return std::max(1.0, 2.0 * max_abs / log_n);
}

double auto_rho(const Eigen::VectorXd& y) {
  return default_rho(static_cast<double>(y.size()),
                     auto_truncation_constant(y));
}

int select_level(std::size_t sample_size, int d, double r) {
  require(sample_size >= 2, "sample size must be at least 2");
  require(d >= 1, "dimension must be positive");
  require(r > 0.0 && r <= 1.0, "Hoelder exponent must lie in (0, 1]");
  // log2 of n^{1/(d+2r)}; the slack absorbs rounding at exact powers of two
  // such as 4096^{1/4} = 8.
  const double log2_target =
      std::log2(static_cast<double>(sample_size)) / (d + 2.0 * r);
  return static_cast<int>(std::floor(log2_target + 1e-12));
}

double l2_error_mc(const RegressionFit& fit, const PhiTable& table,
                   const RegressionFunction& m_true,
                   const Eigen::MatrixXd& test_x) {
  require(test_x.rows() > 0, "L2 error needs a non-empty test set");
  require(test_x.cols() == fit.sieve.d, "test points have the wrong dimension");
  std::vector<double> point(static_cast<std::size_t>(test_x.cols()));
  double total = 0.0;
  for (Eigen::Index r = 0; r < test_x.rows(); ++r) {
    for (Eigen::Index c = 0; c < test_x.cols(); ++c) point[c] = test_x(r, c);
    const double diff = predict(fit, table, point) - m_true(point);
    total += diff * diff;
  }
  return total / static_cast<double>(test_x.rows());
}

nlohmann::json fit_to_json(const RegressionFit& fit) {
  nlohmann::json doc;
  doc["filter"] = fit.sieve.filter.name;
  doc["d"] = fit.sieve.d;
  doc["j"] = fit.sieve.j;
  doc["w"] = fit.sieve.w;
  doc["rho"] = std::isinf(fit.rho) ? nlohmann::json(nullptr) : nlohmann::json(fit.rho);
  doc["svd_report"] = {
      {"rank", fit.svd.rank},
      {"condition_number", fit.svd.condition_number},
      {"singular_values", fit.svd.singular_values},
      {"dropped", fit.svd.dropped},
      {"degenerate", fit.svd.degenerate},
  };
  nlohmann::json coeffs = nlohmann::json::array();
  for (std::size_t c = 0; c < fit.sieve.size(); ++c) {
    coeffs.push_back({{"gamma", fit.sieve.translations[c]},
                      {"a", fit.coeffs[static_cast<Eigen::Index>(c)]}});
  }
  doc["coefficients"] = std::move(coeffs);
  return doc;
}

RegressionFit fit_from_json(const nlohmann::json& doc) {
  try {
    RegressionFit fit;
    fit.sieve.filter = filter_by_name(doc.at("filter").get<std::string>());
    fit.sieve.d = doc.at("d").get<int>();
    fit.sieve.j = doc.at("j").get<int>();
    fit.sieve.w = doc.at("w").get<int>();
    const auto& rho = doc.at("rho");
    fit.rho = rho.is_null() ? kNoTruncation : rho.get<double>();
    const auto& report = doc.at("svd_report");
    fit.svd.rank = report.at("rank").get<std::size_t>();
    fit.svd.condition_number = report.at("condition_number").get<double>();
    fit.svd.singular_values = report.at("singular_values").get<std::vector<double>>();
    fit.svd.dropped = report.at("dropped").get<std::vector<double>>();
    fit.svd.degenerate = report.at("degenerate").get<bool>();
    const auto& coeffs = doc.at("coefficients");
    fit.coeffs.resize(static_cast<Eigen::Index>(coeffs.size()));
    for (std::size_t c = 0; c < coeffs.size(); ++c) {
      auto gamma = coeffs[c].at("gamma").get<Translation>();
      require(gamma.size() == static_cast<std::size_t>(fit.sieve.d),
              "coefficient translation has the wrong dimension");
      fit.sieve.translations.push_back(std::move(gamma));
      fit.coeffs[static_cast<Eigen::Index>(c)] = coeffs[c].at("a").get<double>();
    }
    return fit;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParse, std::string("malformed fit document: ") + e.what());
  }
}

}  // namespace wavesieve
