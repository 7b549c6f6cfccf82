#pragma once

#include <cstddef>
#include <vector>

namespace bbm {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(std::size_t order);

/// Gauss-Hermite rule for the standard normal density: sum_i w_i g(x_i) ~ E g(Z).
/// Weights sum to one.
QuadratureRule gauss_hermite_normal(std::size_t order);

}  // namespace bbm
