#include "bbm/experiments.hpp"
#include "bbm/moments.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace bbm;

TEST_CASE("summaries across paths") {
  const std::vector<double> v{4.0, 1.0, 3.0, 2.0};
  const AcrossPaths s = summarize(v);
  CHECK(s.mean == 2.5);
  CHECK(s.median == 2.5);
  CHECK(s.stddev == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(s.std_error == doctest::Approx(std::sqrt(5.0 / 12.0)));
  CHECK(summarize(std::vector<double>{7.0}).median == 7.0);
  CHECK(summarize(std::vector<double>{7.0}).std_error == 0.0);
}

TEST_CASE("Cholesky basis is orthonormal in the grid inner product") {
  const OrthonormalBasis b = orthonormal_basis_coordinates(ProcessParams(0.9, 0.7), 7);
  CHECK(b.orthonormality_residual <= 1e-8);
}

TEST_CASE("residual variance table") {
  const ProcessParams params(0.9, 0.7);
  const int level = 6;
  const SpdFactor f = cholesky_spd(gram_matrix(params, DyadicGrid(level)));
  const Matrix t = residual_variance_table(f, level);
  REQUIRE(t.rows() == 63);
  REQUIRE(t.cols() == 65);
  CHECK(residual_variances_monotone(t));
  std::size_t row = 1;
  for (int j = 1; j < level; ++j)
    for (std::size_t k = 1; k <= (std::size_t{1} << j); ++k, ++row) {
      CHECK(t(row, 0) == doctest::Approx(second_diff_cov_direct(params, j, k, k)).epsilon(1e-10));
      CHECK(t(row, 64) == 0.0);
    }
  Matrix bad(1, 2);
  bad(0, 1) = 1.0;
  CHECK_FALSE(residual_variances_monotone(bad));
  CHECK_THROWS_AS(residual_variance_table(f, level + 1), std::invalid_argument);
}

TEST_CASE("truncated residuals vanish at full truncation and at N = 0 equal the path") {
  const ProcessParams params(0.8, 0.9);
  const DyadicGrid grid(5);
  const SpdFactor f = cholesky_spd(gram_matrix(params, grid));
  const auto z = path_normals(4, 2, grid.intervals());
  const std::vector<std::size_t> truncs{0, 4, 16, 32};
  const auto res = truncated_residuals(f, z, truncs);
  const auto path = synthesize(f, z);
  CHECK(res[0] == path);
  for (double r : res[3]) CHECK(r == 0.0);
  for (std::size_t i = 1; i <= 4; ++i) CHECK(res[1][i] == 0.0);
}

TEST_CASE("theorem hypotheses are enforced") {
  CHECK_THROWS_AS(check_ito_nisio_hypothesis(ProcessParams(0.5, 0.7), 0.05, 40), HypothesisViolation);
  CHECK_THROWS_AS(check_ito_nisio_hypothesis(ProcessParams(0.9, 0.7), 0.05, 4), HypothesisViolation);
  CHECK_NOTHROW(check_ito_nisio_hypothesis(ProcessParams(0.9, 0.7), 0.05, 40));
  ItoNisioConfig cfg;
  cfg.truncations = {8, 16, 32};
  cfg.holder_gamma = 0.7;
  CHECK_THROWS_AS(run_ito_nisio(ProcessParams(0.9, 0.7), 5, cfg, 2, 0, 1), HypothesisViolation);
  cfg.holder_gamma = 0.5;
  cfg.truncations = {8, 16};
  CHECK_THROWS_AS(run_ito_nisio(ProcessParams(0.9, 0.7), 5, cfg, 2, 0, 1), std::invalid_argument);
  cfg.truncations = {16, 8, 32};
  CHECK_THROWS_AS(run_ito_nisio(ProcessParams(0.9, 0.7), 5, cfg, 2, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(run_lln(ProcessParams(0.5, 1.0), 2.0, 5, 10, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(run_lln(ProcessParams(0.5, 1.0), 0.0, 8, 10, 0, 1), std::domain_error);
}

TEST_CASE("small Ito-Nisio run") {
  ItoNisioConfig cfg;
  cfg.truncations = {8, 16, 32, 64};
  const auto r = run_ito_nisio(ProcessParams(0.9, 0.7), 6, cfg, 10, 3, 2);
  CHECK(r.rows.size() == 4);
  CHECK(r.full_residual == 0.0);
  CHECK(r.residual_variance_monotone);
  CHECK(r.rows.back().median_besov == 0.0);
  CHECK(r.rows.back().max_residual_variance == 0.0);
  CHECK(r.rows.front().median_besov > 0.0);
  const auto again = run_ito_nisio(ProcessParams(0.9, 0.7), 6, cfg, 10, 3, 1);
  for (std::size_t i = 0; i < r.rows.size(); ++i) CHECK(again.rows[i].besov == r.rows[i].besov);
}

TEST_CASE("LLN statistic is exact in mean for Brownian motion at p = 2") {
  const auto r = run_lln(ProcessParams(0.5, 1.0), 2.0, 7, 400, 9, 2);
  CHECK(r.target == 1.0);
  CHECK(r.levels.size() == 6);
  CHECK(std::abs(r.finest_z) <= 4.0);
  CHECK(r.per_path.rows() == 400);
}

TEST_CASE("membership trend of Brownian paths") {
  const std::vector<double> offsets{-0.1, 0.0, 0.1};
  const auto r = run_besov_membership(ProcessParams(0.5, 1.0), 6.0, 9, 40, 1, offsets, 2);
  REQUIRE(r.reports.size() == 3);
  CHECK(r.reports[0].slope < -0.05);
  CHECK(std::abs(r.reports[1].slope) < 0.05);
  CHECK(r.reports[2].slope > 0.05);
  CHECK(r.reports[1].gamma == doctest::Approx(0.5));
}

TEST_CASE("residual variance tail sums match Monte Carlo") {
  const std::vector<std::pair<int, std::size_t>> spots{{2, 3}, {4, 9}};
  const auto out = residual_variance_check(ProcessParams(0.9, 0.7), 5, 8, spots, 4000, 2, 2);
  REQUIRE(out.size() == 2);
  for (const auto& s : out) {
    CHECK(s.exact > 0.0);
    CHECK(std::abs(s.z) <= 4.0);
  }
}
