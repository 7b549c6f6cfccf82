#pragma once

#include "bbm/covariance.hpp"
#include "bbm/matrix.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace bbm {

// Exact second moments of the dyadic second differences
//   u_jk = 2 * 2^(j/2) * ( B((2k-1)/2^(j+1)) - B(2k/2^(j+1))/2 - B((2k-2)/2^(j+1))/2 ),
// j >= 1, k = 1 .. 2^j, and of their normalizations v_jk = u_jk / sigma_jk.

/// E[u_jk u_jk'] by bilinear expansion over the kernel. Ground truth.
double second_diff_cov_direct(const ProcessParams& params, int j, std::size_t k, std::size_t kp);

/// The two finite-difference terms of the closed form, before the prefactor.
struct SecondDiffTerms {
  double psi = 0.0;  // Delta^2_y Delta^2_x Psi_{k,k'}(0,0)
  double phi = 0.0;  // Delta^4 Phi_{k,k'}(0)
};

/// Forward unit-step differences (binomial weights) of
///   Psi(x,y) = ((2k-2+x)^2a + (2k'-2+y)^2a)^b,  Phi(x) = |2(k-k')-2+x|^2ab.
SecondDiffTerms second_diff_terms(const ProcessParams& params, std::size_t k, std::size_t kp);

/// E[u_jk u_jk'] = 2^(j(1-2ab)) / 2^(b+2ab) * (psi - phi).
double second_diff_cov_identity(const ProcessParams& params, int j, std::size_t k, std::size_t kp);

/// Full 2^j x 2^j matrix E[u_jk u_jk'] from a tabulated kernel on the level-(j+1) grid.
Matrix second_diff_cov_matrix(const ProcessParams& params, int j, unsigned threads = 0);

struct SecondDiffMoments {
  ProcessParams params;
  int level = 1;
  Matrix cov;                 // E[u_jk u_jk']
  std::vector<double> sigma;  // sqrt(cov_kk)
  Matrix rho;                 // E[v_jk v_jk'], unit diagonal
};

/// Throws std::runtime_error if a variance comes out non-positive.
SecondDiffMoments normalized_cov(const ProcessParams& params, int j, unsigned threads = 0);

/// sigma_jk for k = 1 .. 2^j (index k-1).
std::vector<double> second_diff_sigma(const ProcessParams& params, int j);

/// Statistics of m_jk = E|u_jk|^2 * 2^(-j(1-2ab)).
struct VarianceScaling {
  double ratio_min = 0.0;
  double ratio_max = 0.0;
  std::vector<double> level_min;  // per level in the range
  std::vector<double> level_max;
  /// max over (j, k) of |m_jk - m_{j0,k}| / m_{j0,k}, j0 the first level holding k.
  double max_level_dependence = 0.0;
  /// Bracket grows by at most 1% per level.
  bool stable = true;
};

VarianceScaling variance_scaling_check(const ProcessParams& params, int j_min, int j_max);

/// S_j = sum_{k,k'} (E v_jk v_jk')^2.
double correlation_sum(const ProcessParams& params, int j, unsigned threads = 0);
double correlation_sum(const Matrix& rho);

/// c_p = E|Z|^p = 2^(p/2) Gamma((p+1)/2) / sqrt(pi).
double gaussian_abs_moment(double p);

/// Quadrature orders and budgets.
inline constexpr std::size_t kAngularOrder = 64;
inline constexpr std::size_t kHermiteOrder = 64;
inline constexpr double kPairBudget = 1e-8;

/// E[(|X|^p - c_p)(|Y|^p - c_p)] for a standard bivariate normal pair with
/// correlation rho. Uses the exact radial moment and Gauss-Legendre in the
/// angle, split at the zeros of |cos|, so the integrand is smooth per piece.
double gaussian_pair_functional(double rho, double p);

/// Same functional by a tensor 2-D Gauss-Hermite rule. Exact for polynomial
/// integrands (even integer p); inaccurate near the |x|^p kinks otherwise.
double gaussian_pair_functional_hermite(double rho, double p, std::size_t order = kHermiteOrder);

struct LemmaCheck {
  std::string lemma;
  int level = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

/// lhs = |pair functional|, rhs = (c_2p - c_p^2) rho^2.
LemmaCheck gaussian_pair_bound_check(double rho, double p);

/// lhs = E[sum_k (|v_jk|^p - c_p)]^2 exactly, rhs = (c_2p - c_p^2) S_j.
LemmaCheck lln_variance_bound(const ProcessParams& params, int j, double p, unsigned threads = 0);
LemmaCheck lln_variance_bound(const Matrix& rho, double p, int j);

}  // namespace bbm
