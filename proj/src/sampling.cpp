#include "bbm/sampling.hpp"

#include "bbm/parallel.hpp"
#include "bbm/rng.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace bbm {

DyadicGrid::DyadicGrid(int level) : level_(level) {
  if (level < 1 || level > 30) throw std::invalid_argument("grid level must lie in [1, 30]");
}

std::vector<double> DyadicGrid::points() const {
  std::vector<double> pts(size());
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = point(i);
  return pts;
}

int level_from_size(std::size_t size) {
  if (size < 3) throw std::length_error("dyadic array needs 2^J + 1 values with J >= 1");
  const std::size_t n = size - 1;
  if ((n & (n - 1)) != 0) throw std::length_error("dyadic array length must be 2^J + 1, got " + std::to_string(size));
  int level = 0;
  while ((std::size_t{1} << level) < n) ++level;
  return level;
}

NotPositiveDefinite::NotPositiveDefinite(std::size_t pivot_index, double pivot_value)
    : std::runtime_error("matrix is not positive definite: pivot " + std::to_string(pivot_index) + " = " +
                         [](double v) {
                           char buf[32];
                           std::snprintf(buf, sizeof buf, "%.3g", v);
                           return std::string(buf);
                         }(pivot_value) + " (request diagonal jitter or use a coarser grid)"),
      pivot_index_(pivot_index),
      pivot_value_(pivot_value) {}

double SpdFactor::reconstruction_error(const Matrix& gram) const {
  const std::size_t n = lower.rows();
  double err = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k <= j; ++k) s += lower(i, k) * lower(j, k);
      err = std::max(err, std::abs(s - gram(i, j)));
    }
  }
  return err;
}

Matrix gram_matrix(const ProcessParams& params, const DyadicGrid& grid) {
  const std::size_t n = grid.intervals();
  Matrix g(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t l = 0; l <= i; ++l) {
      const double r = kernel(params, grid.point(i + 1), grid.point(l + 1));
      g(i, l) = r;
      g(l, i) = r;
    }
  }
  return g;
}

SpdFactor cholesky_spd(const Matrix& gram, double jitter) {
  const std::size_t n = gram.rows();
  if (gram.cols() != n) throw std::invalid_argument("cholesky_spd: matrix must be square");
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, gram(i, i) + jitter);
  const double floor = kPivotRelTol * max_diag;

  SpdFactor f{Matrix(n, n), jitter};
  Matrix& l = f.lower;
  for (std::size_t i = 0; i < n; ++i) {
    const auto li = l.row(i);
    for (std::size_t j = 0; j < i; ++j) {
      const auto lj = l.row(j);
      double s = gram(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= li[k] * lj[k];
      li[j] = s / lj[j];
    }
    double d = gram(i, i) + jitter;
    for (std::size_t k = 0; k < i; ++k) d -= li[k] * li[k];
    if (!(d > floor)) throw NotPositiveDefinite(i, d);
    li[i] = std::sqrt(d);
  }
  return f;
}

std::vector<double> path_normals(std::uint64_t seed, std::size_t path_index, std::size_t count) {
  std::vector<double> z(count);
  for (std::size_t n = 0; n < count; ++n) z[n] = counter_normal(seed, path_index, n);
  return z;
}

std::vector<double> synthesize(const SpdFactor& factor, std::span<const double> normals) {
  const std::size_t n = factor.dimension();
  if (normals.size() != n) throw std::invalid_argument("synthesize: need one variate per grid point");
  std::vector<double> values(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto li = factor.lower.row(i);
    double s = 0.0;
    for (std::size_t k = 0; k <= i; ++k) s += li[k] * normals[k];
    values[i + 1] = s;
  }
  return values;
}

PathSampler::PathSampler(const ProcessParams& params, const DyadicGrid& grid, bool jitter)
    : params_(params), grid_(grid), factor_(cholesky_spd(gram_matrix(params, grid), jitter ? kJitter : 0.0)) {}

PathSample PathSampler::sample(std::uint64_t seed, std::size_t path_index) const {
  const auto z = path_normals(seed, path_index, factor_.dimension());
  return PathSample{grid_, synthesize(factor_, z), seed, path_index, params_};
}

std::vector<PathSample> sample_paths(const ProcessParams& params, const DyadicGrid& grid,
                                     std::size_t n_paths, std::uint64_t seed,
                                     const SamplingOptions& options) {
  if (n_paths == 0) throw std::invalid_argument("n_paths must be at least 1");
  const PathSampler sampler(params, grid, options.jitter);
  std::vector<PathSample> out(n_paths, PathSample{grid, {}, seed, 0, params});
  parallel_for(n_paths, options.threads, [&](std::size_t p) { out[p] = sampler.sample(seed, p); });
  return out;
}

}  // namespace bbm
