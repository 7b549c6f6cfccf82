#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bbm {

/// Faber-Schauder coefficients of a function sampled on a level-J dyadic grid.
///
/// levels[j][k-1] holds f_jk for j = 0 .. J-1 and k = 1 .. 2^j:
///   f_jk = 2 * 2^(j/2) * ( f((2k-1)/2^(j+1)) - f(2k/2^(j+1))/2 - f((2k-2)/2^(j+1))/2 ).
struct SchauderCoeffs {
  double f0 = 0.0;  // f(0)
  double f1 = 0.0;  // f(1) - f(0)
  std::vector<std::vector<double>> levels;

  int depth() const { return static_cast<int>(levels.size()); }
  double at(int j, std::size_t k) const { return levels.at(j).at(k - 1); }

  /// All-zero coefficients with `depth` levels.
  static SchauderCoeffs zeros(int depth);
};

/// Forward transform. Throws std::length_error when the input is not 2^J + 1 long.
SchauderCoeffs schauder_coeffs(std::span<const double> values);

/// Inverse transform onto the level-J grid; uses levels 0 .. J-1 of `coeffs`.
std::vector<double> reconstruct(const SchauderCoeffs& coeffs, int level);

/// Level terms T_j = 2^(-j(1/2 - gamma + 1/p)) (sum_k |f_jk|^p)^(1/p).
struct BesovReport {
  double gamma = 0.0;
  double p = 0.0;
  std::vector<double> level_terms;
  double seq_norm = 0.0;  // max(|f0|, |f1|, sup_j T_j)
  double slope = 0.0;     // log2-slope of T_j over the upper half of levels (NaN below 4 levels)
};

/// Throws std::domain_error unless 1 < p < inf and 1/p < gamma < 1.
void check_besov_range(double gamma, double p);

BesovReport besov_seq_norm(const SchauderCoeffs& coeffs, double gamma, double p);

/// Slope threshold separating "T_j -> 0" from "T_j flat".
inline constexpr double kBesSlopeTol = 0.02;

enum class BesVerdict {
  in_bes,     // slope below -tol, or all tail terms vanish
  not_in_bes, // flat tail, bounded away from zero
  diverging,  // slope above +tol
};

struct BesCriterion {
  std::vector<double> level_terms;
  double slope = 0.0;
  BesVerdict verdict = BesVerdict::not_in_bes;
};

/// Least-squares slope of log2(terms[j]) against j over j = n/2 .. n-1.
/// Returns -inf when every tail term is zero. Needs at least 4 terms.
double upper_half_log2_slope(std::span<const double> terms);

BesCriterion bes_criterion(const SchauderCoeffs& coeffs, double gamma, double p);

/// Grid version of ||f||_Lp + sup_t Delta_p(f)(t) / t^gamma, with shifts
/// restricted to multiples of the grid step and integrals to Riemann sums.
double direct_besov_norm(std::span<const double> values, double gamma, double p);

/// sup_i |f_i| + max_{i<l} |f_l - f_i| / (t_l - t_i)^gamma over grid pairs.
double holder_norm(std::span<const double> values, double gamma);

}  // namespace bbm
