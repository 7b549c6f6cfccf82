#pragma once

#include "bbm/covariance.hpp"
#include "bbm/matrix.hpp"
#include "bbm/sampling.hpp"
#include "bbm/schauder.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace bbm {

/// A theorem hypothesis does not hold for the requested configuration.
class HypothesisViolation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Mean, spread and standard error of one quantity across paths.
struct AcrossPaths {
  double mean = 0.0;
  double stddev = 0.0;
  double std_error = 0.0;
  double median = 0.0;
};

AcrossPaths summarize(std::span<const double> values);

// ---------------------------------------------------------------------------
// Normalized second differences: s_j = 2^-j sum_k |v_jk|^p -> c_p.

struct LlnRunResult {
  ProcessParams params;
  double p = 0.0;
  int grid_level = 0;
  std::size_t n_paths = 0;
  std::uint64_t seed = 0;
  std::vector<int> levels;       // 1 .. J-1
  Matrix per_path;               // n_paths x levels.size(), entry s_j
  std::vector<AcrossPaths> stats;  // per level
  double target = 0.0;           // c_p
  /// (mean s_{J-1} - c_p) / SE at the finest level.
  double finest_z = 0.0;
};

LlnRunResult run_lln(const ProcessParams& params, double p, int grid_level, std::size_t n_paths,
                     std::uint64_t seed, unsigned threads = 0);

/// s_j for one path, using exact sigma_jk. sigmas[j-1] holds sigma_j.
std::vector<double> lln_statistics(std::span<const double> path, double p,
                                   const std::vector<std::vector<double>>& sigmas);

// ---------------------------------------------------------------------------
// Besov membership trends of the level terms T_j at gamma = ab + offset.

struct MembershipReport {
  double offset = 0.0;
  double gamma = 0.0;
  double p = 0.0;
  std::vector<double> mean_terms;       // (across-path mean of T_j^p)^(1/p)
  std::vector<double> terms_std_error;  // its standard error (delta method)
  double slope = 0.0;                   // upper-half log2 slope of mean_terms
  double mean_seq_norm = 0.0;
  BesVerdict verdict = BesVerdict::not_in_bes;
};

struct MembershipRunResult {
  ProcessParams params;
  double p = 0.0;
  int grid_level = 0;
  std::size_t n_paths = 0;
  std::uint64_t seed = 0;
  std::vector<MembershipReport> reports;  // one per offset
};

/// Aggregates over arbitrary dyadic paths. gamma = hurst + offset.
std::vector<MembershipReport> besov_membership(std::span<const std::vector<double>> paths, double hurst,
                                               double p, std::span<const double> offsets);

MembershipRunResult run_besov_membership(const ProcessParams& params, double p, int grid_level,
                                         std::size_t n_paths, std::uint64_t seed,
                                         std::span<const double> offsets, unsigned threads = 0);

/// Flatness at offset 0 and separation at +-0.05.
inline constexpr double kFlatSlopeTol = 0.05;
inline constexpr double kTrendSlope = 0.03;

// ---------------------------------------------------------------------------
// Truncated expansions in the Cholesky (innovations) basis of the grid RKHS.

struct OrthonormalBasis {
  SpdFactor factor;          // coordinates <phi_n, 1_[0,t_i]> = L(i-1, n)
  double orthonormality_residual = 0.0;  // max |L^-1 G L^-T - I|
};

/// max |L^-1 G L^-T - I|.
double orthonormality_residual(const SpdFactor& factor, const Matrix& gram);

OrthonormalBasis orthonormal_basis_coordinates(const ProcessParams& params, int grid_level);

/// Row c = 2^j - 1 + (k-1) for coefficient (j,k); column N = 0 .. 2^J holds
/// the exact residual variance (rho^N_jk)^2 = sum_{n >= N} theta_{jk,n}^2.
Matrix residual_variance_table(const SpdFactor& factor, int grid_level);

/// True when every row of the table is non-increasing in N.
bool residual_variances_monotone(const Matrix& table);

/// B - X_N on the grid for each N in `truncations`, from one set of variates.
std::vector<std::vector<double>> truncated_residuals(const SpdFactor& factor, std::span<const double> normals,
                                                     std::span<const std::size_t> truncations);

struct TruncationRow {
  std::size_t truncation = 0;
  std::vector<double> besov;   // per path, Bes(ab - eps, p) sequence norm of B - X_N
  std::vector<double> holder;  // per path, Hoelder-gamma norm of B - X_N
  double median_besov = 0.0;
  double median_holder = 0.0;
  double max_residual_variance = 0.0;  // max_jk (rho^N_jk)^2
};

struct ItoNisioConfig {
  std::vector<std::size_t> truncations;  // increasing, last = 2^J
  double epsilon = 0.05;
  double p = 40.0;
  double holder_gamma = 0.5;
  bool besov = true;
  bool holder = true;
};

struct ItoNisioRunResult {
  ProcessParams params;
  int grid_level = 0;
  ItoNisioConfig config;
  std::size_t n_paths = 0;
  std::uint64_t seed = 0;
  std::vector<TruncationRow> rows;
  double full_residual = 0.0;             // largest |B - X_N| entry at N = 2^J over all paths
  bool besov_median_monotone = true;      // within 5%
  bool holder_median_monotone = true;     // within 5%
  bool residual_variance_monotone = true; // exact, every N and (j,k)
};

inline constexpr double kMedianSlack = 1.05;

/// Throws HypothesisViolation unless ab > 1/2 and 1/2 < ab - eps - 1/p.
void check_ito_nisio_hypothesis(const ProcessParams& params, double epsilon, double p);

ItoNisioRunResult run_ito_nisio(const ProcessParams& params, int grid_level, const ItoNisioConfig& config,
                                std::size_t n_paths, std::uint64_t seed, unsigned threads = 0);

/// Hoelder-only variant; needs ab > 1/2 and 0 < gamma < ab.
ItoNisioRunResult run_holder_corollary(const ProcessParams& params, int grid_level,
                                       std::vector<std::size_t> truncations, double gamma,
                                       std::size_t n_paths, std::uint64_t seed, unsigned threads = 0);

struct ResidualVarianceSpot {
  int j = 0;
  std::size_t k = 0;
  double exact = 0.0;      // (rho^N_jk)^2
  double empirical = 0.0;  // mean of (u_jk - z_jk)^2 over paths
  double std_error = 0.0;
  double z = 0.0;          // (empirical - exact) / std_error
};

/// Monte Carlo check of the exact tail sums at selected (j, k).
std::vector<ResidualVarianceSpot> residual_variance_check(const ProcessParams& params, int grid_level,
                                                          std::size_t truncation,
                                                          std::span<const std::pair<int, std::size_t>> spots,
                                                          std::size_t n_paths, std::uint64_t seed,
                                                          unsigned threads = 0);

}  // namespace bbm
