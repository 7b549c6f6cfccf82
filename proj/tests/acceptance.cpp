#include "cli.hpp"

#include "bbm/covariance.hpp"
#include "bbm/experiments.hpp"
#include "bbm/moments.hpp"
#include "bbm/rng.hpp"
#include "bbm/sampling.hpp"
#include "bbm/schauder.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace bbm;
namespace fs = std::filesystem;

namespace {

const std::vector<std::pair<double, double>> kPairs{{0.3, 0.5}, {0.5, 0.5}, {0.7, 0.8}, {0.9, 0.6}, {0.7, 1.0}};
constexpr std::uint64_t kSeed = 0;

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0, double e = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d, e);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Verdict moment_identity() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (auto [a, b] : kPairs) {
    const ProcessParams params(a, b);
    for (int j = 1; j <= 8; ++j) {
      const std::size_t n = std::size_t{1} << j;
      for (std::size_t k = 1; k <= n; ++k)
        for (std::size_t kp = 1; kp <= n; ++kp) {
          const double oracle = second_diff_cov_direct(params, j, k, kp);
          const double id = second_diff_cov_identity(params, j, k, kp);
          worst = std::max(worst, std::abs(id - oracle) / std::max(1.0, std::abs(oracle)));
        }
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-10 && secs < 60.0, fmt("max scaled error %.2e over 5 pairs, j<=8; %.1f s", worst, secs)};
}

Verdict beta_one() {
  double cov_err = 0.0;
  for (double a : {0.05, 0.2, 0.35, 0.5, 0.65, 0.8, 0.95, 0.99})
    for (int i = 0; i <= 32; ++i)
      for (int l = 0; l <= 32; ++l) {
        const double s = i / 32.0, t = l / 32.0;
        cov_err = std::max(cov_err, std::abs(bbm_cov(ProcessParams(a, 1.0), s, t) - fbm_cov(a, s, t)));
      }
  double psi = 0.0;
  for (double a : {0.2, 0.5, 0.7, 0.9})
    for (std::size_t k = 1; k <= 256; ++k)
      for (std::size_t kp = 1; kp <= 256; ++kp)
        psi = std::max(psi, std::abs(second_diff_terms(ProcessParams(a, 1.0), k, kp).psi));
  double var_err = 0.0;
  const ProcessParams bm(0.5, 1.0);
  for (int j = 1; j <= 10; ++j)
    for (std::size_t k = 1; k <= (std::size_t{1} << j); ++k) {
      var_err = std::max(var_err, std::abs(second_diff_cov_identity(bm, j, k, k) - 1.0));
      var_err = std::max(var_err, std::abs(second_diff_cov_direct(bm, j, k, k) - 1.0));
    }
  return {cov_err <= 1e-12 && psi <= 1e-10 && var_err <= 1e-10,
          fmt("|R - R_fBm| %.2e, max |mixed term| %.2e, max |E u^2 - 1| (Brownian, j<=10) %.2e", cov_err, psi, var_err)};
}

Verdict variance_scaling() {
  bool ok = true;
  std::ostringstream os;
  for (auto [a, b] : kPairs) {
    const VarianceScaling v = variance_scaling_check(ProcessParams(a, b), 1, 10);
    ok = ok && v.max_level_dependence <= 1e-10 && v.ratio_min > 0.0 && std::isfinite(v.ratio_max);
    os << fmt("(%.1f,%.1f) [%.4f, %.4f] dep %.1e; ", a, b, v.ratio_min, v.ratio_max, v.max_level_dependence);
  }
  return {ok, "j <= 10: " + os.str()};
}

Verdict correlation_sums() {
  bool ok = true;
  double worst = 0.0;
  for (auto [a, b] : kPairs) {
    const ProcessParams params(a, b);
    const double s4 = correlation_sum(params, 4) / 16.0;
    for (int j = 5; j <= 10; ++j) {
      const double r = correlation_sum(params, j) / std::exp2(j) / s4;
      worst = std::max(worst, r);
      ok = ok && r <= 1.25;
    }
  }
  double bm_err = 0.0;
  for (int j = 1; j <= 10; ++j)
    bm_err = std::max(bm_err, std::abs(correlation_sum(ProcessParams(0.5, 1.0), j) / std::exp2(j) - 1.0));
  ok = ok && bm_err <= 1e-12;
  return {ok, fmt("max (S_j/2^j)/(S_4/2^4) = %.4f for 5<=j<=10; Brownian |S_j/2^j - 1| <= %.1e", worst, bm_err)};
}

Verdict pair_bound() {
  bool ok = true;
  double margin = -1e300, isserlis = 0.0;
  for (double p : {1.0, 2.0, 3.0})
    for (double rho : {-1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 1.0}) {
      const LemmaCheck c = gaussian_pair_bound_check(rho, p);
      ok = ok && c.pass;
      margin = std::max(margin, c.lhs - c.rhs);
      if (p == 2.0) isserlis = std::max(isserlis, std::abs(gaussian_pair_functional(rho, p) - 2.0 * rho * rho));
    }
  ok = ok && isserlis <= 1e-8;
  return {ok, fmt("max (lhs - rhs) = %.2e over rho grid, p in {1,2,3}; p=2 vs 2 rho^2: %.1e", margin, isserlis)};
}

Verdict lln() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto bm = run_lln(ProcessParams(0.5, 1.0), 2.0, 10, 200, kSeed);
  const auto bb = run_lln(ProcessParams(0.75, 0.8), 2.0, 10, 200, kSeed);
  const double secs = seconds_since(t0);
  return {std::abs(bm.finest_z) <= 4.0 && std::abs(bb.finest_z) <= 4.0 && secs < 300.0,
          fmt("mean s_9: (0.5,1) %.4f (%+.2f SE), (0.75,0.8) ", bm.stats.back().mean, bm.finest_z) +
              fmt("%.4f (%+.2f SE); %.1f s", bb.stats.back().mean, bb.finest_z, secs)};
}

Verdict membership() {
  const std::vector<double> offsets{-0.05, 0.0, 0.05};
  const auto r = run_besov_membership(ProcessParams(0.6, 0.9), 6.0, 10, 100, kSeed, offsets);
  const double lo = r.reports[0].slope, mid = r.reports[1].slope, hi = r.reports[2].slope;
  return {lo <= -kTrendSlope && std::abs(mid) <= kFlatSlopeTol && hi >= kTrendSlope,
          fmt("slopes at ab-0.05, ab, ab+0.05: %+.4f, %+.4f, %+.4f", lo, mid, hi)};
}

Verdict schauder() {
  const int level = 10;
  const std::size_t n = (std::size_t{1} << level) + 1;
  std::vector<double> f(n), g(n), mix(n), affine(n);
  for (std::size_t i = 0; i < n; ++i) {
    f[i] = counter_normal(kSeed, 1, i);
    g[i] = counter_normal(kSeed, 2, i);
    mix[i] = 1.5 * f[i] - 2.0 * g[i];
    affine[i] = 0.25 + 3.0 * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  const SchauderCoeffs cf = schauder_coeffs(f), cg = schauder_coeffs(g), cm = schauder_coeffs(mix);
  const auto back = reconstruct(cf, level);
  double fwd = 0.0;
  for (std::size_t i = 0; i < n; ++i) fwd = std::max(fwd, std::abs(back[i] - f[i]));

  SchauderCoeffs c = SchauderCoeffs::zeros(level);
  std::size_t idx = 0;
  for (auto& row : c.levels)
    for (double& x : row) x = counter_normal(kSeed, 3, idx++);
  const SchauderCoeffs again = schauder_coeffs(reconstruct(c, level));
  double inv = 0.0, lin = 0.0, aff = 0.0;
  const SchauderCoeffs ca = schauder_coeffs(affine);
  for (int j = 0; j < level; ++j)
    for (std::size_t k = 0; k < c.levels[j].size(); ++k) {
      inv = std::max(inv, std::abs(again.levels[j][k] - c.levels[j][k]));
      lin = std::max(lin, std::abs(cm.levels[j][k] - (1.5 * cf.levels[j][k] - 2.0 * cg.levels[j][k])));
      aff = std::max(aff, std::abs(ca.levels[j][k]));
    }
  return {fwd <= 1e-12 && inv <= 1e-12 && lin <= 1e-12 && aff <= 1e-12,
          fmt("J=10 round trip %.1e / %.1e, linearity %.1e, affine coefficients %.1e", fwd, inv, lin, aff)};
}

ItoNisioRunResult& ito_nisio_run() {
  static ItoNisioRunResult run = [] {
    ItoNisioConfig cfg;
    cfg.truncations = {32, 64, 128, 256, 512};
    cfg.epsilon = 0.05;
    cfg.p = 40.0;
    cfg.holder_gamma = 0.5;
    return run_ito_nisio(ProcessParams(0.9, 0.7), 9, cfg, 50, kSeed);
  }();
  return run;
}

Verdict ito_nisio() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& r = ito_nisio_run();
  double full = 0.0;
  for (double v : r.rows.back().besov) full = std::max(full, v);
  const std::vector<std::pair<int, std::size_t>> spots{{1, 2}, {3, 5}, {5, 17}, {7, 100}, {8, 256}};
  const auto check = residual_variance_check(ProcessParams(0.9, 0.7), 9, 128, spots, 10000, kSeed);
  double zmax = 0.0;
  for (const auto& s : check) zmax = std::max(zmax, std::abs(s.z));
  const double secs = seconds_since(t0);
  std::ostringstream medians;
  for (const auto& row : r.rows) medians << (row.truncation == 32 ? "" : ", ") << fmt("%.3g", row.median_besov);
  return {full <= 1e-10 && r.besov_median_monotone && r.residual_variance_monotone && zmax <= 4.0 && secs < 600.0,
          "residual norm at N=512 " + fmt("%.1e", full) + "; medians " + medians.str() +
              (r.residual_variance_monotone ? "; tail sums monotone" : "; tail sums NOT monotone") +
              fmt("; MC max |z| %.2f at 10^4 paths; %.1f s", zmax, secs)};
}

Verdict holder() {
  const auto& r = ito_nisio_run();
  double full = 0.0;
  for (double v : r.rows.back().holder) full = std::max(full, v);
  std::ostringstream medians;
  for (const auto& row : r.rows) medians << (row.truncation == 32 ? "" : ", ") << fmt("%.3g", row.median_holder);
  return {r.holder_median_monotone && full <= 1e-10,
          "gamma=0.5 medians " + medians.str() + "; at N=512 " + fmt("%.1e", full)};
}

std::map<std::string, std::string> tree(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) {
      std::ifstream in(e.path(), std::ios::binary);
      files[fs::relative(e.path(), dir).string()] = {std::istreambuf_iterator<char>(in), {}};
    }
  return files;
}

Verdict determinism() {
  const fs::path root = fs::current_path() / "acceptance_runs";
  const fs::path input = root / "input";
  fs::remove_all(root);
  std::ostringstream sink;
  const auto run = [&](std::vector<std::string> args) {
    args.insert(args.begin(), "bbm");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    return cli::run(static_cast<int>(argv.size()), argv.data(), sink, sink);
  };
  if (run({"sample", "--level", "7", "--out", input.string()}) != 0) return {false, "input path could not be sampled"};
  const std::vector<std::vector<std::string>> commands{
      {"sample", "--alpha", "0.6", "--beta", "0.9", "--level", "7", "--paths", "8"},
      {"coeffs", "--input", (input / "paths" / "path_0000.csv").string()},
      {"besov", "--alpha", "0.6", "--beta", "0.9", "--level", "7", "--paths", "8"},
      {"moments", "--alpha", "0.7", "--beta", "0.8", "--level", "6"},
      {"lln", "--alpha", "0.75", "--beta", "0.8", "--level", "7", "--paths", "8"},
      {"ito-nisio", "--alpha", "0.9", "--beta", "0.7", "--level", "7", "--paths", "8"},
      {"holder", "--alpha", "0.9", "--beta", "0.7", "--level", "7", "--paths", "8"},
  };
  std::size_t files = 0;
  for (const auto& base : commands) {
    std::map<std::string, std::string> reference;
    for (const char* threads : {"1", "4", "1"}) {
      const fs::path dir = root / (base[0] + "_" + threads + "_" + std::to_string(reference.size()));
      auto args = base;
      args.insert(args.end(), {"--threads", threads, "--out", dir.string()});
      if (run(args) != 0) return {false, base[0] + " exited non-zero"};
      const auto out = tree(dir);
      if (reference.empty()) {
        reference = out;
        files += out.size();
      } else if (out != reference) {
        return {false, base[0] + " output differs at --threads " + threads};
      }
    }
  }
  return {true, "7 commands x 3 runs (threads 1, 4, 1), " + std::to_string(files) + " files byte identical"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"moment identity vs direct oracle", moment_identity},
      {"beta = 1 reductions", beta_one},
      {"variance scaling", variance_scaling},
      {"correlation sums bounded", correlation_sums},
      {"Gaussian pair bound", pair_bound},
      {"LLN statistic", lln},
      {"Besov membership trends", membership},
      {"Schauder transform", schauder},
      {"Ito-Nisio truncation", ito_nisio},
      {"Hoelder truncation", holder},
      {"CLI determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v{false, ""};
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += v.pass ? 0 : 1;
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first << "): " << v.detail
              << std::endl;
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
