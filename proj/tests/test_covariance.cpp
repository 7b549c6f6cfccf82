#include "bbm/covariance.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace bbm;

TEST_CASE("bifractional kernel matches high-precision reference values") {
  struct Ref {
    double alpha, beta, s, t, value;
  };
  const std::vector<Ref> refs{
      {0.3, 0.5, 0.25, 0.75, 0.22463193639989990043},
      {0.7, 0.8, 0.1, 0.9, 0.081835410571638534303},
      {0.9, 0.6, 0.5, 0.5, 0.47302882336279795812},
      {0.5, 1.0, 0.3, 0.6, 0.2999999999999999889},
      {0.7, 1.0, 0.2, 0.45, 0.14421799850206326679},
  };
  for (const auto& r : refs) {
    CAPTURE(r.alpha);
    CAPTURE(r.beta);
    CHECK(bbm_cov(ProcessParams(r.alpha, r.beta), r.s, r.t) == doctest::Approx(r.value).epsilon(1e-14));
  }
}

TEST_CASE("sub-fractional kernel matches reference values") {
  CHECK(subfbm_cov(0.3, 0.25, 0.75) == doctest::Approx(0.44686466303948813281).epsilon(1e-14));
  CHECK(subfbm_cov(0.8, 0.1, 0.9) == doctest::Approx(0.020109354676859289146).epsilon(1e-12));
  CHECK(kernel(ProcessParams::subfractional(0.3), 0.25, 0.75) == subfbm_cov(0.3, 0.25, 0.75));
}

TEST_CASE("trivial values") {
  const ProcessParams p(0.6, 0.7);
  CHECK(bbm_cov(p, 0.0, 0.0) == 0.0);
  CHECK(bbm_cov(p, 0.0, 0.5) == 0.0);
  CHECK(bbm_cov(p, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(fbm_cov(0.5, 0.3, 0.7) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(p.hurst() == doctest::Approx(0.42));
}

TEST_CASE("beta = 1 reduces to fractional Brownian motion") {
  for (double a : {0.1, 0.3, 0.5, 0.7, 0.95})
    for (double s : {0.0, 0.125, 0.4, 1.0})
      for (double t : {0.05, 0.5, 0.9375, 1.0}) {
        const double b = bbm_cov(ProcessParams(a, 1.0), s, t);
        CHECK(std::abs(b - fbm_cov(a, s, t)) <= 1e-12);
        CHECK(std::abs(kernel(ProcessParams::fractional(a), s, t) - fbm_cov(a, s, t)) <= 1e-15);
      }
}

TEST_CASE("symmetry, quasi-helix bounds and self-similarity") {
  const std::vector<double> alphas{0.2, 0.5, 0.8, 0.99};
  const std::vector<double> betas{0.1, 0.5, 0.9, 1.0};
  const std::vector<double> times{0.0, 0.01, 0.2, 0.37, 0.5, 0.83, 1.0, 2.5};
  for (double a : alphas)
    for (double b : betas) {
      const ProcessParams params(a, b);
      for (double s : times)
        for (double t : times) {
          CHECK(bbm_cov(params, s, t) == bbm_cov(params, t, s));
          const double v = increment_variance(params, s, t);
          const auto [lo, hi] = quasi_helix_bounds(params, s, t);
          CHECK(v >= lo - 1e-14);
          CHECK(v <= hi + 1e-14);
          for (double scale : {0.25, 3.0}) {
            const auto [lhs, rhs] = self_similarity_check(params, scale, s, t);
            CHECK(std::abs(lhs - rhs) <= 1e-13 * std::max(1.0, std::abs(rhs)));
          }
        }
    }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(ProcessParams(0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(ProcessParams(1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(ProcessParams(0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ProcessParams(0.5, 1.01), std::invalid_argument);
  CHECK_THROWS_AS(ProcessParams(0.5, 0.5, KernelKind::fractional), std::invalid_argument);
  CHECK_NOTHROW(ProcessParams(0.5, 1.0));
  CHECK_THROWS_AS(bbm_cov(ProcessParams(0.5, 0.5), -0.1, 0.2), std::domain_error);
  CHECK_THROWS_AS(kernel_kind_from_string("brownian"), std::invalid_argument);
  CHECK(kernel_kind_from_string("subfractional") == KernelKind::subfractional);
  CHECK(to_string(KernelKind::fractional) == "fractional");
}
