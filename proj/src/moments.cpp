#include "bbm/moments.hpp"

#include "bbm/accumulate.hpp"
#include "bbm/parallel.hpp"
#include "bbm/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace bbm {

namespace {

constexpr std::array<double, 3> kStencil{-0.5, 1.0, -0.5};
constexpr std::array<double, 3> kDelta2{1.0, -2.0, 1.0};
constexpr std::array<double, 5> kDelta4{1.0, -4.0, 6.0, -4.0, 1.0};

void check_index(int j, std::size_t k, std::size_t kp) {
  if (j < 1 || j > 30) throw std::out_of_range("second difference level must lie in [1, 30]");
  const std::size_t count = std::size_t{1} << j;
  if (k < 1 || k > count || kp < 1 || kp > count)
    throw std::out_of_range("second difference index k must lie in [1, 2^j]");
}

}  // namespace

double second_diff_cov_direct(const ProcessParams& params, int j, std::size_t k, std::size_t kp) {
  check_index(j, k, kp);
  const double h = std::exp2(-(j + 1));
  double s = 0.0;
  for (std::size_t a = 0; a < 3; ++a) {
    const double x = static_cast<double>(2 * k - 2 + a) * h;
    for (std::size_t b = 0; b < 3; ++b) {
      const double y = static_cast<double>(2 * kp - 2 + b) * h;
      s += kStencil[a] * kStencil[b] * kernel(params, x, y);
    }
  }
  return 4.0 * std::exp2(j) * s;
}

SecondDiffTerms second_diff_terms(const ProcessParams& params, std::size_t k, std::size_t kp) {
  if (params.kind() == KernelKind::subfractional)
    throw std::invalid_argument("closed-form second moments exist for the bifractional kernel only");
  if (k < 1 || kp < 1) throw std::out_of_range("second difference index k must be >= 1");
  const double a2 = 2.0 * params.alpha();
  const double b = params.beta();
  const double h2 = a2 * b;

  // Delta^2_y as a weighted sum of increments G(s + d) - G(s), G = (.)^b.
  const auto power_increments = [a2](double m) {
    std::array<double, 3> d{};
    for (std::size_t i = 1; i < 3; ++i)
      d[i] = m == 0.0 ? std::pow(static_cast<double>(i), a2)
                      : std::pow(m, a2) * std::expm1(a2 * std::log1p(static_cast<double>(i) / m));
    return d;
  };
  const double mx = static_cast<double>(2 * k - 2), my = static_cast<double>(2 * kp - 2);
  const auto dy = power_increments(my);
  const double py0 = std::pow(my, a2);
  const auto g_increment = [b](double s, double d) {
    return s == 0.0 ? std::pow(d, b) : std::pow(s, b) * std::expm1(b * std::log1p(d / s));
  };
  std::array<double, 3> inner{};
  for (std::size_t x = 0; x < 3; ++x) {
    const double s = std::pow(mx + static_cast<double>(x), a2) + py0;
    for (std::size_t y = 1; y < 3; ++y) inner[x] += kDelta2[y] * g_increment(s, dy[y]);
  }
  SecondDiffTerms t;
  for (std::size_t x = 0; x < 3; ++x) t.psi += kDelta2[x] * inner[x];
  const double shift = 2.0 * (static_cast<double>(k) - static_cast<double>(kp)) - 2.0;
  for (std::size_t x = 0; x < 5; ++x) t.phi += kDelta4[x] * std::pow(std::abs(shift + static_cast<double>(x)), h2);
  return t;
}

double second_diff_cov_identity(const ProcessParams& params, int j, std::size_t k, std::size_t kp) {
  check_index(j, k, kp);
  const double h = params.hurst();
  const SecondDiffTerms t = second_diff_terms(params, k, kp);
  return std::exp2(j * (1.0 - 2.0 * h) - params.beta() - 2.0 * h) * (t.psi - t.phi);
}

Matrix second_diff_cov_matrix(const ProcessParams& params, int j, unsigned threads) {
  check_index(j, 1, 1);
  const std::size_t count = std::size_t{1} << j;
  const std::size_t points = 2 * count + 1;
  const double h = std::exp2(-(j + 1));

  Matrix table(points, points);
  parallel_for(points, threads, [&](std::size_t i) {
    for (std::size_t l = 0; l < points; ++l)
      table(i, l) = kernel(params, static_cast<double>(i) * h, static_cast<double>(l) * h);
  });

  // rows: stencil applied on the first argument
  Matrix half(count, points);
  parallel_for(count, threads, [&](std::size_t r) {
    for (std::size_t l = 0; l < points; ++l) {
      double s = 0.0;
      for (std::size_t a = 0; a < 3; ++a) s += kStencil[a] * table(2 * r + a, l);
      half(r, l) = s;
    }
  });

  const double scale = 4.0 * std::exp2(j);
  Matrix cov(count, count);
  parallel_for(count, threads, [&](std::size_t r) {
    for (std::size_t c = 0; c < count; ++c) {
      double s = 0.0;
      for (std::size_t b = 0; b < 3; ++b) s += kStencil[b] * half(r, 2 * c + b);
      cov(r, c) = scale * s;
    }
  });
  // exact symmetry
  for (std::size_t r = 0; r < count; ++r)
    for (std::size_t c = 0; c < r; ++c) cov(c, r) = cov(r, c);
  return cov;
}

SecondDiffMoments normalized_cov(const ProcessParams& params, int j, unsigned threads) {
  SecondDiffMoments m{params, j, second_diff_cov_matrix(params, j, threads), {}, {}};
  const std::size_t n = m.cov.rows();
  m.sigma.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double v = m.cov(k, k);
    if (!(v > 0.0))
      throw std::runtime_error("internal inconsistency: non-positive second-difference variance at k=" +
                               std::to_string(k + 1));
    m.sigma[k] = std::sqrt(v);
  }
  m.rho = Matrix(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) m.rho(r, c) = m.cov(r, c) / (m.sigma[r] * m.sigma[c]);
    m.rho(r, r) = 1.0;
  }
  return m;
}

std::vector<double> second_diff_sigma(const ProcessParams& params, int j) {
  check_index(j, 1, 1);
  std::vector<double> sigma(std::size_t{1} << j);
  for (std::size_t k = 1; k <= sigma.size(); ++k) {
    const double v = second_diff_cov_direct(params, j, k, k);
    if (!(v > 0.0))
      throw std::runtime_error("internal inconsistency: non-positive second-difference variance at k=" +
                               std::to_string(k));
    sigma[k - 1] = std::sqrt(v);
  }
  return sigma;
}

VarianceScaling variance_scaling_check(const ProcessParams& params, int j_min, int j_max) {
  if (j_min < 1 || j_max < j_min) throw std::invalid_argument("variance scaling needs 1 <= j_min <= j_max");
  VarianceScaling out;
  std::vector<double> reference;  // m_{j0,k} by k-1
  const double h = params.hurst();
  for (int j = j_min; j <= j_max; ++j) {
    const std::size_t count = std::size_t{1} << j;
    const double norm = std::exp2(-j * (1.0 - 2.0 * h));
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t k = 1; k <= count; ++k) {
      const double m = second_diff_cov_direct(params, j, k, k) * norm;
      lo = std::min(lo, m);
      hi = std::max(hi, m);
      if (k > reference.size())
        reference.push_back(m);
      else
        out.max_level_dependence = std::max(out.max_level_dependence, std::abs(m - reference[k - 1]) / reference[k - 1]);
    }
    if (!out.level_max.empty()) {
      if (hi > out.level_max.back() * 1.01 || lo < out.level_min.back() * 0.99) out.stable = false;
    }
    out.level_min.push_back(lo);
    out.level_max.push_back(hi);
  }
  out.ratio_min = *std::min_element(out.level_min.begin(), out.level_min.end());
  out.ratio_max = *std::max_element(out.level_max.begin(), out.level_max.end());
  return out;
}

double correlation_sum(const Matrix& rho) {
  CompensatedSum s;
  for (double r : rho.data()) s += r * r;
  return s.value();
}

double correlation_sum(const ProcessParams& params, int j, unsigned threads) {
  return correlation_sum(normalized_cov(params, j, threads).rho);
}

double gaussian_abs_moment(double p) {
  if (!(p > 0.0)) throw std::domain_error("absolute moment order p must be positive");
  return std::exp(0.5 * p * std::numbers::ln2 + std::lgamma(0.5 * (p + 1.0)) - 0.5 * std::log(std::numbers::pi));
}

namespace {

void check_rho(double rho) {
  if (!(std::abs(rho) <= 1.0)) throw std::domain_error("correlation must lie in [-1, 1]");
}

// (1/pi) * integral over [0, pi) of |cos t|^p |cos(t - phi)|^p dt.
double angular_mean(double phi, double p, const QuadratureRule& rule) {
  const double pi = std::numbers::pi;
  std::vector<double> cuts{0.0, pi / 2, std::fmod(phi + pi / 2, pi), pi};
  std::sort(cuts.begin(), cuts.end());
  CompensatedSum s;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double lo = cuts[c];
    const double hi = cuts[c + 1];
    if (hi - lo <= 0.0) continue;
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double t = mid + half * rule.nodes[i];
      s += half * rule.weights[i] * std::pow(std::abs(std::cos(t)) * std::abs(std::cos(t - phi)), p);
    }
  }
  return s.value() / pi;
}

}  // namespace

double gaussian_pair_functional(double rho, double p) {
  check_rho(rho);
  const double cp = gaussian_abs_moment(p);
  static const QuadratureRule rule = gauss_legendre(kAngularOrder);
  // X = r cos t, Y = r cos(t - phi) with cos phi = rho; r^2 ~ Exp(1/2) independent of t.
  const double radial = std::exp(p * std::numbers::ln2 + std::lgamma(p + 1.0));
  return radial * angular_mean(std::acos(rho), p, rule) - cp * cp;
}

double gaussian_pair_functional_hermite(double rho, double p, std::size_t order) {
  check_rho(rho);
  const double cp = gaussian_abs_moment(p);
  const QuadratureRule q = gauss_hermite_normal(order);
  const double c = std::sqrt(std::max(0.0, 1.0 - rho * rho));
  CompensatedSum s;
  for (std::size_t a = 0; a < q.nodes.size(); ++a) {
    const double x = q.nodes[a];
    const double fx = std::pow(std::abs(x), p) - cp;
    for (std::size_t b = 0; b < q.nodes.size(); ++b) {
      const double y = rho * x + c * q.nodes[b];
      s += q.weights[a] * q.weights[b] * fx * (std::pow(std::abs(y), p) - cp);
    }
  }
  return s.value();
}

LemmaCheck gaussian_pair_bound_check(double rho, double p) {
  check_rho(rho);
  const double cp = gaussian_abs_moment(p);
  LemmaCheck c{"gaussian_pair_bound", 0, std::abs(gaussian_pair_functional(rho, p)),
               (gaussian_abs_moment(2.0 * p) - cp * cp) * rho * rho, false};
  c.pass = c.lhs <= c.rhs + kPairBudget;
  return c;
}

LemmaCheck lln_variance_bound(const Matrix& rho, double p, int j) {
  const std::size_t n = rho.rows();
  const double cp = gaussian_abs_moment(p);
  const double var = gaussian_abs_moment(2.0 * p) - cp * cp;
  CompensatedSum lhs;
  for (std::size_t r = 0; r < n; ++r) {
    lhs += var;  // diagonal: Var(|Z|^p)
    for (std::size_t c = 0; c < r; ++c) lhs += 2.0 * gaussian_pair_functional(std::clamp(rho(r, c), -1.0, 1.0), p);
  }
  LemmaCheck out{"lln_variance_bound", j, lhs.value(), var * correlation_sum(rho), false};
  out.pass = out.lhs <= out.rhs + kPairBudget * std::max(1.0, out.rhs);
  return out;
}

LemmaCheck lln_variance_bound(const ProcessParams& params, int j, double p, unsigned threads) {
  return lln_variance_bound(normalized_cov(params, j, threads).rho, p, j);
}

}  // namespace bbm
