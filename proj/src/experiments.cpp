#include "bbm/experiments.hpp"

#include "bbm/accumulate.hpp"
#include "bbm/moments.hpp"
#include "bbm/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace bbm {

AcrossPaths summarize(std::span<const double> values) {
  AcrossPaths s;
  const std::size_t n = values.size();
  if (n == 0) return s;
  CompensatedSum sum;
  for (double v : values) sum += v;
  s.mean = sum.value() / static_cast<double>(n);
  if (n > 1) {
    CompensatedSum sq;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(sq.value() / static_cast<double>(n - 1));
    s.std_error = s.stddev / std::sqrt(static_cast<double>(n));
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  s.median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  return s;
}

// ---------------------------------------------------------------------------

std::vector<double> lln_statistics(std::span<const double> path, double p,
                                   const std::vector<std::vector<double>>& sigmas) {
  const SchauderCoeffs c = schauder_coeffs(path);
  std::vector<double> out;
  for (std::size_t j = 1; j < c.levels.size() && j <= sigmas.size(); ++j) {
    const auto& row = c.levels[j];
    const auto& sig = sigmas[j - 1];
    CompensatedSum s;
    for (std::size_t k = 0; k < row.size(); ++k) s += std::pow(std::abs(row[k] / sig[k]), p);
    out.push_back(s.value() / static_cast<double>(row.size()));
  }
  return out;
}

LlnRunResult run_lln(const ProcessParams& params, double p, int grid_level, std::size_t n_paths,
                     std::uint64_t seed, unsigned threads) {
  if (!(p > 0.0)) throw std::domain_error("lln: p must be positive");
  if (grid_level < 6) throw std::invalid_argument("lln: grid level must be at least 6");
  if (n_paths == 0) throw std::invalid_argument("n_paths must be at least 1");

  LlnRunResult r{params, p, grid_level, n_paths, seed, {}, {}, {}, gaussian_abs_moment(p), 0.0};
  std::vector<std::vector<double>> sigmas;
  for (int j = 1; j < grid_level; ++j) {
    r.levels.push_back(j);
    sigmas.push_back(second_diff_sigma(params, j));
  }
  const PathSampler sampler(params, DyadicGrid(grid_level));
  r.per_path = Matrix(n_paths, r.levels.size());
  parallel_for(n_paths, threads, [&](std::size_t path) {
    const PathSample s = sampler.sample(seed, path);
    const auto stats = lln_statistics(s.values, p, sigmas);
    std::copy(stats.begin(), stats.end(), r.per_path.row(path).begin());
  });
  std::vector<double> column(n_paths);
  for (std::size_t l = 0; l < r.levels.size(); ++l) {
    for (std::size_t path = 0; path < n_paths; ++path) column[path] = r.per_path(path, l);
    r.stats.push_back(summarize(column));
  }
  const AcrossPaths& last = r.stats.back();
  r.finest_z = last.std_error > 0.0 ? (last.mean - r.target) / last.std_error : 0.0;
  return r;
}

// ---------------------------------------------------------------------------

std::vector<MembershipReport> besov_membership(std::span<const std::vector<double>> paths, double hurst,
                                               double p, std::span<const double> offsets) {
  for (double d : offsets) check_besov_range(hurst + d, p);
  if (paths.empty()) throw std::invalid_argument("besov membership needs at least one path");

  std::vector<SchauderCoeffs> coeffs;
  coeffs.reserve(paths.size());
  for (const auto& path : paths) coeffs.push_back(schauder_coeffs(path));
  const int depth = coeffs.front().depth();

  std::vector<MembershipReport> out;
  for (double d : offsets) {
    MembershipReport m;
    m.offset = d;
    m.gamma = hurst + d;
    m.p = p;
    Matrix terms(paths.size(), static_cast<std::size_t>(depth));
    std::vector<double> norms(paths.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      const BesovReport rep = besov_seq_norm(coeffs[i], m.gamma, p);
      if (static_cast<int>(rep.level_terms.size()) != depth)
        throw std::invalid_argument("besov membership: paths must share one grid level");
      std::copy(rep.level_terms.begin(), rep.level_terms.end(), terms.row(i).begin());
      norms[i] = rep.seq_norm;
    }
    // power mean: E[T_j^p] is a sum of Gaussian absolute moments, free of the
    // Jensen bias a plain mean of T_j carries at coarse levels
    std::vector<double> column(paths.size());
    for (int j = 0; j < depth; ++j) {
      double scale = 0.0;
      for (std::size_t i = 0; i < paths.size(); ++i) scale = std::max(scale, terms(i, j));
      if (scale == 0.0) {
        m.mean_terms.push_back(0.0);
        m.terms_std_error.push_back(0.0);
        continue;
      }
      for (std::size_t i = 0; i < paths.size(); ++i) column[i] = std::pow(terms(i, j) / scale, p);
      const AcrossPaths s = summarize(column);
      const double mean = scale * std::pow(s.mean, 1.0 / p);
      m.mean_terms.push_back(mean);
      // delta method: d(x^(1/p)) = x^(1/p - 1) dx / p
      m.terms_std_error.push_back(scale * std::pow(s.mean, 1.0 / p - 1.0) * s.std_error / p);
    }
    m.mean_seq_norm = summarize(norms).mean;
    m.slope = depth >= 4 ? upper_half_log2_slope(m.mean_terms) : std::numeric_limits<double>::quiet_NaN();
    if (m.slope < -kBesSlopeTol)
      m.verdict = BesVerdict::in_bes;
    else if (m.slope > kBesSlopeTol)
      m.verdict = BesVerdict::diverging;
    out.push_back(std::move(m));
  }
  return out;
}

MembershipRunResult run_besov_membership(const ProcessParams& params, double p, int grid_level,
                                         std::size_t n_paths, std::uint64_t seed,
                                         std::span<const double> offsets, unsigned threads) {
  for (double d : offsets) check_besov_range(params.hurst() + d, p);
  const auto samples = sample_paths(params, DyadicGrid(grid_level), n_paths, seed, {false, threads});
  std::vector<std::vector<double>> paths;
  paths.reserve(samples.size());
  for (const auto& s : samples) paths.push_back(s.values);
  return {params, p, grid_level, n_paths, seed, besov_membership(paths, params.hurst(), p, offsets)};
}

// ---------------------------------------------------------------------------

double orthonormality_residual(const SpdFactor& factor, const Matrix& gram) {
  const Matrix& l = factor.lower;
  const std::size_t n = l.rows();
  // inverse of the lower factor, row by row
  Matrix inv(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    inv(c, c) = 1.0 / l(c, c);
    for (std::size_t r = c + 1; r < n; ++r) {
      double s = 0.0;
      for (std::size_t k = c; k < r; ++k) s += l(r, k) * inv(k, c);
      inv(r, c) = -s / l(r, r);
    }
  }
  Matrix w(n, n);  // inv * gram
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t k = 0; k <= r; ++k) {
      const double a = inv(r, k);
      const auto g = gram.row(k);
      auto out = w.row(r);
      for (std::size_t c = 0; c < n; ++c) out[c] += a * g[c];
    }
  double err = 0.0;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      double s = 0.0;
      for (std::size_t k = 0; k <= c; ++k) s += w(r, k) * inv(c, k);
      err = std::max(err, std::abs(s - (r == c ? 1.0 : 0.0)));
    }
  return err;
}

OrthonormalBasis orthonormal_basis_coordinates(const ProcessParams& params, int grid_level) {
  const Matrix gram = gram_matrix(params, DyadicGrid(grid_level));
  OrthonormalBasis b{cholesky_spd(gram), 0.0};
  b.orthonormality_residual = orthonormality_residual(b.factor, gram);
  return b;
}

Matrix residual_variance_table(const SpdFactor& factor, int grid_level) {
  const std::size_t n = factor.dimension();
  if (n != (std::size_t{1} << grid_level)) throw std::invalid_argument("factor does not match grid level");
  const std::size_t coeffs = n - 1;
  Matrix table(coeffs, n + 1);
  const auto value = [&](std::size_t g, std::size_t col) { return g == 0 ? 0.0 : factor.lower(g - 1, col); };
  std::size_t row = 0;
  for (int j = 0; j < grid_level; ++j) {
    const std::size_t step = std::size_t{1} << (grid_level - j - 1);
    const double scale = 2.0 * std::exp2(0.5 * j);
    for (std::size_t k = 1; k <= (std::size_t{1} << j); ++k, ++row) {
      const std::size_t mid = (2 * k - 1) * step;
      for (std::size_t col = n; col-- > 0;) {
        const double theta = scale * (value(mid, col) - 0.5 * value(mid + step, col) - 0.5 * value(mid - step, col));
        table(row, col) = table(row, col + 1) + theta * theta;
      }
    }
  }
  return table;
}

bool residual_variances_monotone(const Matrix& table) {
  for (std::size_t r = 0; r < table.rows(); ++r)
    for (std::size_t c = 0; c + 1 < table.cols(); ++c)
      if (table(r, c + 1) > table(r, c)) return false;
  return true;
}

std::vector<std::vector<double>> truncated_residuals(const SpdFactor& factor, std::span<const double> normals,
                                                     std::span<const std::size_t> truncations) {
  const std::size_t n = factor.dimension();
  if (normals.size() != n) throw std::invalid_argument("truncated_residuals: need one variate per grid point");
  const std::size_t t_count = truncations.size();
  std::vector<std::vector<double>> out(t_count, std::vector<double>(n + 1, 0.0));
  std::vector<double> partial(t_count);
  for (std::size_t i = 0; i < n; ++i) {
    const auto li = factor.lower.row(i);
    double s = 0.0;
    std::size_t t = 0;
    // same summation order as synthesize()
    for (std::size_t k = 0; k <= i; ++k) {
      while (t < t_count && truncations[t] <= k) partial[t++] = s;
      s += li[k] * normals[k];
    }
    while (t < t_count) partial[t++] = s;
    for (std::size_t q = 0; q < t_count; ++q) out[q][i + 1] = s - partial[q];
  }
  return out;
}

void check_ito_nisio_hypothesis(const ProcessParams& params, double epsilon, double p) {
  const double h = params.hurst();
  if (!(h > 0.5)) {
    std::ostringstream os;
    os << "hypothesis violated: alpha*beta > 1/2 required, got alpha*beta = " << h;
    throw HypothesisViolation(os.str());
  }
  if (!(epsilon > 0.0) || !(p >= 1.0)) throw HypothesisViolation("hypothesis violated: need epsilon > 0 and p >= 1");
  if (!(0.5 < h - epsilon - 1.0 / p)) {
    std::ostringstream os;
    os << "hypothesis violated: 1/2 < alpha*beta - eps - 1/p required, got " << h - epsilon - 1.0 / p;
    throw HypothesisViolation(os.str());
  }
}

namespace {

void check_truncations(std::span<const std::size_t> truncations, int grid_level) {
  if (truncations.empty()) throw std::invalid_argument("truncation list must not be empty");
  for (std::size_t i = 1; i < truncations.size(); ++i)
    if (truncations[i] <= truncations[i - 1]) throw std::invalid_argument("truncations must be strictly increasing");
  if (truncations.back() != (std::size_t{1} << grid_level))
    throw std::invalid_argument("largest truncation must equal 2^J");
}

ItoNisioRunResult run_truncations(const ProcessParams& params, int grid_level, const ItoNisioConfig& config,
                                  std::size_t n_paths, std::uint64_t seed, unsigned threads) {
  if (n_paths == 0) throw std::invalid_argument("n_paths must be at least 1");
  check_truncations(config.truncations, grid_level);
  const double besov_gamma = params.hurst() - config.epsilon;

  const Matrix gram = gram_matrix(params, DyadicGrid(grid_level));
  const SpdFactor factor = cholesky_spd(gram);
  const std::size_t n = factor.dimension();
  const std::size_t t_count = config.truncations.size();

  ItoNisioRunResult r{params, grid_level, config, n_paths, seed, {}, 0.0, true, true, true};
  r.rows.resize(t_count);
  for (std::size_t q = 0; q < t_count; ++q) {
    r.rows[q].truncation = config.truncations[q];
    r.rows[q].besov.assign(n_paths, 0.0);
    r.rows[q].holder.assign(n_paths, 0.0);
  }
  std::vector<double> full(n_paths, 0.0);

  parallel_for(n_paths, threads, [&](std::size_t path) {
    const auto z = path_normals(seed, path, n);
    const auto residuals = truncated_residuals(factor, z, config.truncations);
    for (std::size_t q = 0; q < t_count; ++q) {
      if (config.besov)
        r.rows[q].besov[path] = besov_seq_norm(schauder_coeffs(residuals[q]), besov_gamma, config.p).seq_norm;
      if (config.holder) r.rows[q].holder[path] = holder_norm(residuals[q], config.holder_gamma);
    }
    double m = 0.0;
    for (double v : residuals.back()) m = std::max(m, std::abs(v));
    full[path] = m;
  });
  r.full_residual = *std::max_element(full.begin(), full.end());

  const Matrix table = residual_variance_table(factor, grid_level);
  r.residual_variance_monotone = residual_variances_monotone(table);
  for (std::size_t q = 0; q < t_count; ++q) {
    TruncationRow& row = r.rows[q];
    row.median_besov = summarize(row.besov).median;
    row.median_holder = summarize(row.holder).median;
    for (std::size_t c = 0; c < table.rows(); ++c)
      row.max_residual_variance = std::max(row.max_residual_variance, table(c, row.truncation));
    if (q > 0) {
      const TruncationRow& prev = r.rows[q - 1];
      if (row.median_besov > kMedianSlack * prev.median_besov) r.besov_median_monotone = false;
      if (row.median_holder > kMedianSlack * prev.median_holder) r.holder_median_monotone = false;
      if (row.max_residual_variance > prev.max_residual_variance) r.residual_variance_monotone = false;
    }
  }
  return r;
}

}  // namespace

ItoNisioRunResult run_ito_nisio(const ProcessParams& params, int grid_level, const ItoNisioConfig& config,
                                std::size_t n_paths, std::uint64_t seed, unsigned threads) {
  check_ito_nisio_hypothesis(params, config.epsilon, config.p);
  if (config.holder && !(config.holder_gamma > 0.0 && config.holder_gamma < params.hurst()))
    throw HypothesisViolation("hypothesis violated: 0 < gamma < alpha*beta required for the Hoelder residual");
  return run_truncations(params, grid_level, config, n_paths, seed, threads);
}

ItoNisioRunResult run_holder_corollary(const ProcessParams& params, int grid_level,
                                       std::vector<std::size_t> truncations, double gamma,
                                       std::size_t n_paths, std::uint64_t seed, unsigned threads) {
  if (!(params.hurst() > 0.5)) {
    std::ostringstream os;
    os << "hypothesis violated: alpha*beta > 1/2 required, got alpha*beta = " << params.hurst();
    throw HypothesisViolation(os.str());
  }
  if (!(gamma > 0.0 && gamma < params.hurst()))
    throw HypothesisViolation("hypothesis violated: 0 < gamma < alpha*beta required");
  ItoNisioConfig config;
  config.truncations = std::move(truncations);
  config.holder_gamma = gamma;
  config.besov = false;
  return run_truncations(params, grid_level, config, n_paths, seed, threads);
}

std::vector<ResidualVarianceSpot> residual_variance_check(const ProcessParams& params, int grid_level,
                                                          std::size_t truncation,
                                                          std::span<const std::pair<int, std::size_t>> spots,
                                                          std::size_t n_paths, std::uint64_t seed,
                                                          unsigned threads) {
  if (n_paths < 2) throw std::invalid_argument("residual variance check needs at least 2 paths");
  const SpdFactor factor = cholesky_spd(gram_matrix(params, DyadicGrid(grid_level)));
  const std::size_t n = factor.dimension();
  if (truncation > n) throw std::invalid_argument("truncation exceeds 2^J");
  const Matrix table = residual_variance_table(factor, grid_level);

  struct Stencil {
    std::size_t left, mid, right;
    double scale;
  };
  std::vector<Stencil> stencils;
  std::vector<ResidualVarianceSpot> out;
  for (const auto& [j, k] : spots) {
    if (j < 0 || j >= grid_level || k < 1 || k > (std::size_t{1} << j))
      throw std::out_of_range("residual variance spot outside the coefficient array");
    const std::size_t step = std::size_t{1} << (grid_level - j - 1);
    const std::size_t mid = (2 * k - 1) * step;
    stencils.push_back({mid - step, mid, mid + step, 2.0 * std::exp2(0.5 * j)});
    ResidualVarianceSpot s;
    s.j = j;
    s.k = k;
    s.exact = table((std::size_t{1} << j) - 1 + (k - 1), truncation);
    out.push_back(s);
  }

  Matrix squares(n_paths, spots.size());
  parallel_for(n_paths, threads, [&](std::size_t path) {
    const auto z = path_normals(seed, path, n);
    const auto residual = [&](std::size_t g) {
      if (g == 0) return 0.0;
      const auto li = factor.lower.row(g - 1);
      double s = 0.0;
      for (std::size_t k = truncation; k < g; ++k) s += li[k] * z[k];
      return s;
    };
    for (std::size_t q = 0; q < stencils.size(); ++q) {
      const Stencil& st = stencils[q];
      const double u = st.scale * (residual(st.mid) - 0.5 * residual(st.left) - 0.5 * residual(st.right));
      squares(path, q) = u * u;
    }
  });
  std::vector<double> column(n_paths);
  for (std::size_t q = 0; q < out.size(); ++q) {
    for (std::size_t path = 0; path < n_paths; ++path) column[path] = squares(path, q);
    const AcrossPaths s = summarize(column);
    out[q].empirical = s.mean;
    out[q].std_error = s.std_error;
    out[q].z = s.std_error > 0.0 ? (s.mean - out[q].exact) / s.std_error : 0.0;
  }
  return out;
}

}  // namespace bbm
