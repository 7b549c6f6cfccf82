#pragma once

#include "bbm/covariance.hpp"
#include "bbm/matrix.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace bbm {

/// Dyadic points i / 2^level, i = 0 .. 2^level.
class DyadicGrid {
 public:
  explicit DyadicGrid(int level);

  int level() const { return level_; }
  /// Number of intervals, 2^level.
  std::size_t intervals() const { return std::size_t{1} << level_; }
  /// Number of points, 2^level + 1.
  std::size_t size() const { return intervals() + 1; }
  double point(std::size_t i) const { return static_cast<double>(i) / static_cast<double>(intervals()); }
  std::vector<double> points() const;

  friend bool operator==(const DyadicGrid&, const DyadicGrid&) = default;

 private:
  int level_;
};

/// Level of a grid holding `size` points, or throws std::length_error when
/// size is not 2^J + 1 with J >= 1.
int level_from_size(std::size_t size);

struct PathSample {
  DyadicGrid grid;
  std::vector<double> values;  // values[0] == 0
  std::uint64_t seed = 0;      // run seed
  std::size_t path_index = 0;  // variates come from derive_seed(seed, path_index)
  ProcessParams params;
};

class NotPositiveDefinite : public std::runtime_error {
 public:
  NotPositiveDefinite(std::size_t pivot_index, double pivot_value);
  std::size_t pivot_index() const { return pivot_index_; }
  double pivot_value() const { return pivot_value_; }

 private:
  std::size_t pivot_index_;
  double pivot_value_;
};

/// Lower-triangular L with L L^T = G.
struct SpdFactor {
  Matrix lower;
  double jitter = 0.0;  // diagonal shift applied before factorizing

  std::size_t dimension() const { return lower.rows(); }
  /// max |L L^T - G| over all entries.
  double reconstruction_error(const Matrix& gram) const;
};

/// Pivots at or below this fraction of the largest diagonal entry are rejected.
inline constexpr double kPivotRelTol = 1e-12;
/// Diagonal shift used when jitter is requested explicitly.
inline constexpr double kJitter = 1e-12;

/// G_il = R(t_i, t_l) over the nonzero grid points t_1 .. t_{2^J}.
Matrix gram_matrix(const ProcessParams& params, const DyadicGrid& grid);

/// Cholesky factorization. Never regularizes silently: `jitter` is added to
/// the diagonal only when the caller passes it.
SpdFactor cholesky_spd(const Matrix& gram, double jitter = 0.0);

struct SamplingOptions {
  bool jitter = false;
  unsigned threads = 0;  // 0 = all cores
};

/// Standard normal variates of one path: z_n = counter_normal(derive(seed, path), n).
std::vector<double> path_normals(std::uint64_t seed, std::size_t path_index, std::size_t count);

/// Grid values B(t_0) = 0, B(t_i) = sum_{n < i} L(i-1, n) z_n.
std::vector<double> synthesize(const SpdFactor& factor, std::span<const double> normals);

/// Exact sampler on a fixed grid. The factor is computed once and shared.
class PathSampler {
 public:
  PathSampler(const ProcessParams& params, const DyadicGrid& grid, bool jitter = false);

  const ProcessParams& params() const { return params_; }
  const DyadicGrid& grid() const { return grid_; }
  const SpdFactor& factor() const { return factor_; }

  PathSample sample(std::uint64_t seed, std::size_t path_index) const;

 private:
  ProcessParams params_;
  DyadicGrid grid_;
  SpdFactor factor_;
};

std::vector<PathSample> sample_paths(const ProcessParams& params, const DyadicGrid& grid,
                                     std::size_t n_paths, std::uint64_t seed,
                                     const SamplingOptions& options = {});

}  // namespace bbm
