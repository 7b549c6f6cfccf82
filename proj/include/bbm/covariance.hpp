#pragma once

#include <string>
#include <string_view>
#include <utility>

namespace bbm {

enum class KernelKind { bifractional, fractional, subfractional };

std::string_view to_string(KernelKind kind);
KernelKind kernel_kind_from_string(std::string_view name);

/// Parameters of a self-similar Gaussian process on [0, 1].
///
/// For the bifractional kernel both exponents are used; the fractional kernel
/// is the beta = 1 specialization and the subfractional kernel only uses
/// alpha. Ranges are checked once, at construction.
class ProcessParams {
 public:
  ProcessParams(double alpha, double beta, KernelKind kind = KernelKind::bifractional);

  static ProcessParams bifractional(double alpha, double beta) { return {alpha, beta}; }
  static ProcessParams fractional(double hurst) { return {hurst, 1.0, KernelKind::fractional}; }
  static ProcessParams subfractional(double alpha) { return {alpha, 1.0, KernelKind::subfractional}; }

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  KernelKind kind() const { return kind_; }

  /// Self-similarity / path-regularity index (alpha * beta).
  double hurst() const { return alpha_ * beta_; }

  std::string describe() const;

 private:
  double alpha_;
  double beta_;
  KernelKind kind_;
};

/// Bifractional covariance 2^-b ((t^2a + s^2a)^b - |t - s|^2ab).
/// Accepts any s, t >= 0. Exact at s = 0, t = 0 and s = t.
double bbm_cov(const ProcessParams& params, double s, double t);

/// Sub-fractional covariance s^2a + t^2a - ((s + t)^2a + |t - s|^2a) / 2.
double subfbm_cov(double alpha, double s, double t);

/// Fractional covariance (t^2H + s^2H - |t - s|^2H) / 2.
double fbm_cov(double hurst, double s, double t);

/// Dispatches on params.kind().
double kernel(const ProcessParams& params, double s, double t);

/// E(B(t) - B(s))^2 = R(t,t) + R(s,s) - 2R(s,t).
double increment_variance(const ProcessParams& params, double s, double t);

/// Bounds 2^-b |t-s|^2ab and 2^(1-b) |t-s|^2ab on the increment variance.
std::pair<double, double> quasi_helix_bounds(const ProcessParams& params, double s, double t);

/// Returns (R(as, at), a^2ab R(s, t)).
std::pair<double, double> self_similarity_check(const ProcessParams& params, double a, double s, double t);

}  // namespace bbm
