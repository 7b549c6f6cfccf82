#include "bbm/covariance.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace bbm {

namespace {

void check_time(double s, double t) {
  if (!(s >= 0.0) || !(t >= 0.0))
    throw std::domain_error("covariance: times must be non-negative");
}

}  // namespace

std::string_view to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::bifractional: return "bifractional";
    case KernelKind::fractional: return "fractional";
    case KernelKind::subfractional: return "subfractional";
  }
  return "unknown";
}

KernelKind kernel_kind_from_string(std::string_view name) {
  if (name == "bifractional") return KernelKind::bifractional;
  if (name == "fractional") return KernelKind::fractional;
  if (name == "subfractional") return KernelKind::subfractional;
  throw std::invalid_argument("unknown kernel kind '" + std::string(name) + "'");
}

ProcessParams::ProcessParams(double alpha, double beta, KernelKind kind)
    : alpha_(alpha), beta_(beta), kind_(kind) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("alpha must lie in (0,1)");
  if (!(beta > 0.0 && beta <= 1.0))
    throw std::invalid_argument("beta must lie in (0,1]");
  if (kind != KernelKind::bifractional && beta != 1.0)
    throw std::invalid_argument(std::string(to_string(kind)) + " kernel requires beta = 1");
}

std::string ProcessParams::describe() const {
  std::ostringstream os;
  os << to_string(kind_) << "(alpha=" << alpha_ << ", beta=" << beta_ << ")";
  return os.str();
}

double bbm_cov(const ProcessParams& params, double s, double t) {
  check_time(s, t);
  if (s == 0.0 || t == 0.0) return 0.0;
  const double a2 = 2.0 * params.alpha();
  const double b = params.beta();
  const double h2 = a2 * b;
  if (s == t) return std::pow(t, h2);
  const double sum = std::pow(t, a2) + std::pow(s, a2);
  return std::exp2(-b) * (std::pow(sum, b) - std::pow(std::abs(t - s), h2));
}

double subfbm_cov(double alpha, double s, double t) {
  check_time(s, t);
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("alpha must lie in (0,1)");
  if (s == 0.0 || t == 0.0) return 0.0;
  const double a2 = 2.0 * alpha;
  const double diff = s == t ? 0.0 : std::pow(std::abs(t - s), a2);
  return std::pow(s, a2) + std::pow(t, a2) - 0.5 * (std::pow(s + t, a2) + diff);
}

double fbm_cov(double hurst, double s, double t) {
  check_time(s, t);
  if (s == 0.0 || t == 0.0) return 0.0;
  const double h2 = 2.0 * hurst;
  if (s == t) return std::pow(t, h2);
  return 0.5 * (std::pow(t, h2) + std::pow(s, h2) - std::pow(std::abs(t - s), h2));
}

double kernel(const ProcessParams& params, double s, double t) {
  switch (params.kind()) {
    case KernelKind::bifractional: return bbm_cov(params, s, t);
    case KernelKind::fractional: return fbm_cov(params.alpha(), s, t);
    case KernelKind::subfractional: return subfbm_cov(params.alpha(), s, t);
  }
  throw std::logic_error("unreachable kernel kind");
}

double increment_variance(const ProcessParams& params, double s, double t) {
  check_time(s, t);
  if (s == t) return 0.0;
  return kernel(params, t, t) + kernel(params, s, s) - 2.0 * kernel(params, s, t);
}

std::pair<double, double> quasi_helix_bounds(const ProcessParams& params, double s, double t) {
  check_time(s, t);
  const double b = params.beta();
  const double d = std::pow(std::abs(t - s), 2.0 * params.hurst());
  return {std::exp2(-b) * d, std::exp2(1.0 - b) * d};
}

std::pair<double, double> self_similarity_check(const ProcessParams& params, double a, double s, double t) {
  if (!(a > 0.0)) throw std::domain_error("scale must be positive");
  return {kernel(params, a * s, a * t), std::pow(a, 2.0 * params.hurst()) * kernel(params, s, t)};
}

}  // namespace bbm
