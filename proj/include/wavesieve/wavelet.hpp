#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wavesieve {

// Two-scale refinement filter of a compactly supported orthonormal scaling
// function: phi(x) = sqrt(2) sum_l h_l phi(2x - l), supported on [0, L-1].
// The mother filter uses the alternating flip g_l = (-1)^l h_{L-1-l}.
struct ScalingFilter {
  std::string name;
  std::vector<double> h;
  std::vector<double> g;

  std::size_t length() const { return h.size(); }
  int support_width() const { return static_cast<int>(h.size()) - 1; }
};

ScalingFilter make_filter(std::string name, std::vector<double> h);
ScalingFilter haar_filter();
// Daubechies filter with two vanishing moments ("db2", four taps).
ScalingFilter d4_filter();
// "haar" or "d4" (also accepts "db2").
ScalingFilter filter_by_name(const std::string& name);

// Largest |residual| over the orthonormality families
//   sum h = sqrt(2), sum h_l h_{l+2z} = delta_z, sum g_l g_{l+2z} = delta_z,
//   sum g_l h_{l+2z} = 0.
double filter_identity_residual(const ScalingFilter& f);

// phi sampled on the dyadic grid k / 2^r, k = 0 .. (L-1) 2^r.
class PhiTable {
 public:
  enum class Interpolation { kLinear, kStep };

  PhiTable(std::string filter_name, int resolution, int support_width,
           std::vector<double> values, Interpolation mode);

  const std::string& filter_name() const { return filter_name_; }
  int resolution() const { return resolution_; }
  double step() const { return step_; }
  int support_width() const { return support_width_; }
  Interpolation interpolation() const { return mode_; }
  std::span<const double> values() const { return values_; }

  // phi(x); zero outside [0, L-1]. Between grid points the table is
  // interpolated linearly, or held constant from the left for
  // discontinuous (Haar) tables.
  double operator()(double x) const;

  void write_csv(const std::filesystem::path& path) const;

 private:
  std::string filter_name_;
  int resolution_;
  double step_;
  int support_width_;
  std::vector<double> values_;
  Interpolation mode_;
};

inline constexpr int kDefaultPhiResolution = 10;

// Values at the integers come from the eigenvalue-1 eigenvector of the
// refinement matrix [sqrt(2) h_{2n-m}] restricted to the interior points
// 1..L-2 (phi vanishes at 0 and L-1 for continuous phi), scaled so that
// sum_n phi(n) = 1. A two-tap filter has no interior; its phi is the
// indicator of [0, 1). Finer dyadic levels follow from the refinement
// relation.
PhiTable cascade(const ScalingFilter& filter, int r = kDefaultPhiResolution);

using Translation = std::vector<int>;

// Axis-aligned box [lo_i, hi_i] in R^d.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
};

// Tensor-product sieve at dilation M = 2 I_d: basis functions
// Phi_{j,gamma}(x) = 2^{jd/2} prod_i phi(2^j x_i - gamma_i) for gamma in K.
struct WaveletSieve {
  ScalingFilter filter;
  int d = 1;
  int j = 0;
  int w = 0;
  std::vector<Translation> translations;  // lexicographic order

  std::size_t size() const { return translations.size(); }
};

// Full box {gamma : |gamma|_inf <= w} in lexicographic order. With a prune
// box, keeps only gamma whose support [gamma, gamma + L - 1] / 2^j meets the
// half-open box [lo, hi).
std::vector<Translation> translation_set(int w, int d);
std::vector<Translation> translation_set(int w, int d, const Box& prune_to,
                                         int j, int support_width);

// Smallest width whose box covers every translation whose support meets
// `domain` at level j.
int covering_width(const Box& domain, int j, int support_width);

// Sieve over `domain` at level j. With prune == false the full translation
// box of width covering_width(...) is kept.
WaveletSieve make_sieve(const ScalingFilter& filter, int d, int j,
                        const Box& domain, bool prune = true);
WaveletSieve make_sieve_on_unit_cube(const ScalingFilter& filter, int d, int j,
                                     bool prune = true);

double phi_eval(const WaveletSieve& sieve, const PhiTable& table,
                std::span<const int> gamma, std::span<const double> x);

// Coefficient families a_k(gamma) = prod_i a^{k_i}_{gamma_i} with
// a^0 = sqrt(2) h and a^1 = sqrt(2) g, k in {0,1}^d. Families are indexed
// by the bits of k (bit i = k_i); gamma ranges over [0, L-1]^d.
class TensorCoefficients {
 public:
  TensorCoefficients(const ScalingFilter& filter, int d);

  int dimension() const { return d_; }
  std::size_t family_count() const { return std::size_t{1} << d_; }
  int support_width() const { return static_cast<int>(a0_.size()) - 1; }
  // Zero outside the support.
  double operator()(std::size_t k, std::span<const int> gamma) const;
  // sum over gamma of a_k(gamma).
  double sum(std::size_t k) const;

 private:
  int d_;
  std::vector<double> a0_;
  std::vector<double> a1_;
};

TensorCoefficients mother_tensor_coeffs(const ScalingFilter& filter, int d);

}  // namespace wavesieve
