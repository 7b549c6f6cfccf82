#include "cli.hpp"

#include "bbm/experiments.hpp"
#include "bbm/io.hpp"
#include "bbm/moments.hpp"
#include "bbm/sampling.hpp"
#include "bbm/schauder.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace bbm::cli {

namespace fs = std::filesystem;
using io::Json;

namespace {

const std::vector<std::string> kCommands{"sample", "coeffs", "besov", "moments", "lln", "ito-nisio", "holder"};

std::string fmt(double v, int digits = 6) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

ProcessParams make_params(const RunConfig& c) {
  return ProcessParams(c.alpha, c.beta, kernel_kind_from_string(c.kernel));
}

Json config_json(const RunConfig& c) {
  Json j{{"command", c.command}, {"alpha", c.alpha}, {"beta", c.beta}, {"kernel", c.kernel}, {"level", c.level}};
  j["p"] = c.p ? Json(*c.p) : Json(nullptr);
  j["gamma"] = c.gamma ? Json(*c.gamma) : Json(nullptr);
  j["gamma_offsets"] = c.gamma_offsets;
  j["epsilon"] = c.epsilon;
  j["n_paths"] = c.n_paths ? Json(*c.n_paths) : Json(nullptr);
  j["seed"] = c.seed;
  j["truncations"] = c.truncations;
  j["format"] = c.format;
  j["input"] = c.input;
  j["allow_large"] = c.allow_large;
  j["jitter"] = c.jitter;
  return j;
}

/// Collects outputs and contract results for one run directory.
class RunWriter {
 public:
  explicit RunWriter(const RunConfig& config) : config_(config), dir_(config.out) {
    fs::create_directories(dir_);
  }

  const fs::path& dir() const { return dir_; }

  void table(const std::string& stem, const std::vector<std::string>& header,
             const std::vector<std::vector<double>>& rows) {
    if (config_.format == "json") {
      Json a = Json::array();
      for (const auto& row : rows) {
        Json o = Json::object();
        for (std::size_t c = 0; c < header.size() && c < row.size(); ++c) o[header[c]] = io::number(row[c]);
        a.push_back(std::move(o));
      }
      json(stem + ".json", a);
    } else {
      io::write_table_csv(dir_ / (stem + ".csv"), header, rows);
      outputs_.push_back(stem + ".csv");
    }
  }

  void json(const std::string& name, const Json& j) {
    io::write_json(dir_ / name, j);
    outputs_.push_back(name);
  }

  void note(const std::string& name) { outputs_.push_back(name); }

  void contract(const std::string& name, bool pass, const std::string& detail) {
    contracts_.push_back({name, pass, detail});
  }

  bool passed() const {
    return std::all_of(contracts_.begin(), contracts_.end(), [](const Contract& c) { return c.pass; });
  }

  /// Writes manifest.json and summary.txt, prints the summary line.
  void finish(const Json& extra, std::ostream& out) {
    Json manifest{{"command", config_.command}, {"library_version", BBM_VERSION}, {"config", config_json(config_)}};
    for (const auto& [k, v] : extra.items()) manifest[k] = v;
    Json checks = Json::array();
    for (const auto& c : contracts_) checks.push_back(Json{{"contract", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    manifest["contracts"] = checks;
    outputs_.push_back("summary.txt");
    manifest["outputs"] = outputs_;
    io::write_json(dir_ / "manifest.json", manifest);

    std::ostringstream summary;
    summary << config_.command << ' ' << make_params(config_).describe() << " level=" << config_.level
            << " seed=" << config_.seed << '\n';
    for (const auto& c : contracts_) summary << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    summary << (passed() ? "PASS" : "FAIL") << '\n';
    io::write_text(dir_ / "summary.txt", summary.str());

    out << (passed() ? "PASS" : "FAIL");
    for (const auto& c : contracts_) out << " | " << c.name << ": " << c.detail;
    out << '\n';
  }

 private:
  struct Contract {
    std::string name;
    bool pass;
    std::string detail;
  };
  const RunConfig& config_;
  fs::path dir_;
  std::vector<std::string> outputs_;
  std::vector<Contract> contracts_;
};

// ---------------------------------------------------------------------------

void cmd_sample(const RunConfig& c, std::ostream& out) {
  const ProcessParams params = make_params(c);
  const DyadicGrid grid(c.level);
  const auto paths = sample_paths(params, grid, *c.n_paths, c.seed, {c.jitter, c.threads});
  RunWriter w(c);
  bool anchored = true;
  for (const auto& p : paths) anchored = anchored && p.values.front() == 0.0;
  if (c.format == "json") {
    Json ps = Json::array();
    for (const auto& p : paths) ps.push_back(io::numbers(p.values));
    w.json("paths.json", Json{{"t", grid.points()}, {"paths", ps}});
  } else {
    for (const auto& p : paths) {
      char name[32];
      std::snprintf(name, sizeof name, "path_%04zu.csv", p.path_index);
      io::write_path_csv(w.dir() / "paths" / name, p);
      w.note(std::string("paths/") + name);
    }
  }
  w.contract("zero_anchor", anchored, std::to_string(paths.size()) + " paths with value 0 at t=0");
  w.finish(Json{{"params", io::params_json(params)},
                {"level", c.level},
                {"seed", c.seed},
                {"n_paths", *c.n_paths},
                {"diagonal_jitter", c.jitter ? kJitter : 0.0}},
           out);
}

void cmd_coeffs(const RunConfig& c, std::ostream& out) {
  const ProcessParams params = make_params(c);
  std::vector<double> values;
  if (!c.input.empty()) {
    values = io::read_path_csv(c.input);
  } else {
    const PathSampler sampler(params, DyadicGrid(c.level), c.jitter);
    values = sampler.sample(c.seed, 0).values;
  }
  const SchauderCoeffs coeffs = schauder_coeffs(values);
  const auto back = reconstruct(coeffs, coeffs.depth());
  double err = 0.0, scale = 1.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    err = std::max(err, std::abs(back[i] - values[i]));
    scale = std::max(scale, std::abs(values[i]));
  }
  RunWriter w(c);
  if (c.format == "json") {
    Json levels = Json::array();
    for (const auto& row : coeffs.levels) levels.push_back(io::numbers(row));
    w.json("coeffs.json", Json{{"f0", coeffs.f0}, {"f1", coeffs.f1}, {"levels", levels}});
  } else {
    io::write_coeffs_csv(w.dir() / "coeffs.csv", coeffs);
    w.note("coeffs.csv");
  }
  w.contract("round_trip", err <= 1e-12 * scale, "max reconstruction error " + fmt(err, 3));
  w.finish(Json{{"params", io::params_json(params)},
                {"level", coeffs.depth()},
                {"f0", coeffs.f0},
                {"f1", coeffs.f1}},
           out);
}

void cmd_besov(const RunConfig& c, std::ostream& out) {
  const ProcessParams params = make_params(c);
  std::vector<double> offsets = c.gamma_offsets;
  if (c.gamma) offsets = {*c.gamma - params.hurst()};
  const auto run = run_besov_membership(params, *c.p, c.level, *c.n_paths, c.seed, offsets, c.threads);

  RunWriter w(c);
  Json reports = Json::array();
  std::vector<std::string> header{"level"};
  for (const auto& r : run.reports) {
    const char* verdict = r.verdict == BesVerdict::in_bes ? "in_bes" : r.verdict == BesVerdict::diverging ? "diverging" : "not_in_bes";
    reports.push_back(Json{{"gamma", r.gamma},
                           {"p", r.p},
                           {"level_terms", io::numbers(r.mean_terms)},
                           {"seq_norm", io::number(r.mean_seq_norm)},
                           {"slope", io::number(r.slope)},
                           {"offset", r.offset},
                           {"level_terms_std_error", io::numbers(r.terms_std_error)},
                           {"verdict", verdict}});
    header.push_back("T_j@gamma=" + io::format_double(r.gamma));
  }
  w.json("besov_report.json", Json{{"reports", reports}});
  std::vector<std::vector<double>> rows;
  for (int j = 0; j < c.level; ++j) {
    std::vector<double> row{static_cast<double>(j)};
    for (const auto& r : run.reports) row.push_back(r.mean_terms[j]);
    rows.push_back(row);
  }
  w.table("level_terms", header, rows);

  for (const auto& r : run.reports) {
    const std::string name = "slope@gamma=" + fmt(r.gamma, 4);
    if (r.offset == 0.0)
      w.contract(name, std::abs(r.slope) <= kFlatSlopeTol, "flat, slope " + fmt(r.slope, 4) + " within +-0.05");
    else if (r.offset < 0.0)
      w.contract(name, r.slope <= -kTrendSlope, "slope " + fmt(r.slope, 4) + " <= -0.03");
    else
      w.contract(name, r.slope >= kTrendSlope, "slope " + fmt(r.slope, 4) + " >= +0.03");
  }
  w.finish(Json{{"params", io::params_json(params)}, {"level", c.level}, {"seed", c.seed}, {"n_paths", *c.n_paths}}, out);
}

void cmd_moments(const RunConfig& c, std::ostream& out) {
  const ProcessParams params = make_params(c);
  const bool closed_form = params.kind() != KernelKind::subfractional;
  RunWriter w(c);
  Json lemmas = Json::array();

  double worst = 0.0;
  std::vector<std::vector<double>> rows;
  const VarianceScaling scaling = variance_scaling_check(params, 1, c.level);
  double s4 = 0.0;
  bool bounded = true;
  for (int j = 1; j <= c.level; ++j) {
    const SecondDiffMoments m = normalized_cov(params, j, c.threads);
    const std::size_t n = m.cov.rows();
    double level_err = std::numeric_limits<double>::quiet_NaN();
    if (closed_form) {
      level_err = 0.0;
      for (std::size_t k = 1; k <= n; ++k)
        for (std::size_t kp = 1; kp <= n; ++kp) {
          const double oracle = second_diff_cov_direct(params, j, k, kp);
          const double id = second_diff_cov_identity(params, j, k, kp);
          level_err = std::max(level_err, std::abs(id - oracle) / std::max(1.0, std::abs(oracle)));
        }
      worst = std::max(worst, level_err);
    }
    const double s = correlation_sum(m.rho);
    const double ratio = s / std::exp2(j);
    if (j == 4) s4 = ratio;
    if (j > 4 && s4 > 0.0) {
      const LemmaCheck lc{"correlation_sum_bound", j, ratio, 1.25 * s4, ratio <= 1.25 * s4};
      bounded = bounded && lc.pass;
      lemmas.push_back(io::lemma_check_json(lc, params));
    }
    rows.push_back({static_cast<double>(j), level_err, scaling.level_min[j - 1], scaling.level_max[j - 1], s, ratio});
    if (j == c.level) {
      io::write_matrix_csv(w.dir() / "cov_matrix.csv", m.cov);
      w.note("cov_matrix.csv");
    }
  }
  w.table("moments_levels", {"j", "identity_max_rel_err", "var_ratio_min", "var_ratio_max", "S_j", "S_j_over_2j"}, rows);

  lemmas.push_back(io::lemma_check_json(
      {"variance_scaling_level_dependence", c.level, scaling.max_level_dependence, 1e-10, scaling.max_level_dependence <= 1e-10},
      params));
  const double p = *c.p;
  bool pairs_ok = true;
  for (double rho : {-1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 1.0}) {
    LemmaCheck pc = gaussian_pair_bound_check(rho, p);
    pairs_ok = pairs_ok && pc.pass;
    Json j = io::lemma_check_json(pc, params);
    j["rho"] = rho;
    lemmas.push_back(j);
  }
  const int lln_level = std::min(c.level, 8);
  const LemmaCheck lln = lln_variance_bound(params, lln_level, p, c.threads);
  lemmas.push_back(io::lemma_check_json(lln, params));
  w.json("lemma_checks.json", lemmas);

  if (closed_form)
    w.contract("identity_vs_oracle", worst <= 1e-10, "max relative error " + fmt(worst, 3) + " <= 1e-10");
  w.contract("variance_scaling", scaling.max_level_dependence <= 1e-10 && scaling.ratio_min > 0.0,
             "bracket [" + fmt(scaling.ratio_min) + ", " + fmt(scaling.ratio_max) + "], level dependence " +
                 fmt(scaling.max_level_dependence, 3));
  if (c.level > 4) w.contract("correlation_sum", bounded, "S_j/2^j <= 1.25 S_4/2^4 for j > 4");
  w.contract("gaussian_pair_bound", pairs_ok, "lhs <= (c_2p - c_p^2) rho^2 + 1e-8 at p=" + fmt(p));
  w.contract("lln_variance_bound", lln.pass, "j=" + std::to_string(lln_level) + " lhs " + fmt(lln.lhs) + " <= rhs " + fmt(lln.rhs));
  w.finish(Json{{"params", io::params_json(params)},
                {"level", c.level},
                {"angular_quadrature_order", kAngularOrder},
                {"pair_budget", kPairBudget}},
           out);
}

void cmd_lln(const RunConfig& c, std::ostream& out) {
  const ProcessParams params = make_params(c);
  const auto r = run_lln(params, *c.p, c.level, *c.n_paths, c.seed, c.threads);
  RunWriter w(c);
  std::vector<std::vector<double>> rows;
  for (std::size_t l = 0; l < r.levels.size(); ++l) {
    const auto& s = r.stats[l];
    rows.push_back({static_cast<double>(r.levels[l]), s.mean, s.stddev, s.std_error, s.median, r.target});
  }
  w.table("lln_levels", {"j", "mean", "stddev", "std_error", "median", "c_p"}, rows);
  const auto& last = r.stats.back();
  w.contract("finest_level_mean", std::abs(r.finest_z) <= 4.0,
             "mean s_" + std::to_string(r.levels.back()) + " = " + fmt(last.mean) + ", c_p = " + fmt(r.target) +
                 ", " + fmt(r.finest_z, 3) + " SE");
  w.finish(Json{{"params", io::params_json(params)}, {"level", c.level}, {"seed", c.seed}, {"n_paths", *c.n_paths}}, out);
}

void write_truncation_outputs(RunWriter& w, const ItoNisioRunResult& r, bool besov) {
  std::vector<std::vector<double>> rows;
  for (const auto& row : r.rows) {
    if (besov)
      rows.push_back({static_cast<double>(row.truncation), row.median_besov, row.median_holder, row.max_residual_variance});
    else
      rows.push_back({static_cast<double>(row.truncation), row.median_holder, row.max_residual_variance});
  }
  if (besov)
    w.table("truncations", {"N", "median_besov", "median_holder", "max_residual_variance"}, rows);
  else
    w.table("truncations", {"N", "median_holder", "max_residual_variance"}, rows);
}

void cmd_ito_nisio(const RunConfig& c, std::ostream& out) {
  const ProcessParams params = make_params(c);
  ItoNisioConfig ic;
  ic.truncations = c.truncations;
  ic.epsilon = c.epsilon;
  ic.p = *c.p;
  ic.holder_gamma = *c.gamma;
  const auto r = run_ito_nisio(params, c.level, ic, *c.n_paths, c.seed, c.threads);
  RunWriter w(c);
  write_truncation_outputs(w, r, true);

  const SpdFactor factor = cholesky_spd(gram_matrix(params, DyadicGrid(c.level)));
  const Matrix table = residual_variance_table(factor, c.level);
  std::vector<std::string> header{"j", "k"};
  for (std::size_t n : c.truncations) header.push_back("rho2@N=" + std::to_string(n));
  std::vector<std::vector<double>> rows;
  std::size_t row = 0;
  for (int j = 0; j < c.level; ++j)
    for (std::size_t k = 1; k <= (std::size_t{1} << j); ++k, ++row) {
      std::vector<double> line{static_cast<double>(j), static_cast<double>(k)};
      for (std::size_t n : c.truncations) line.push_back(table(row, n));
      rows.push_back(line);
    }
  w.table("residual_variance", header, rows);

  w.contract("zero_at_full_N", r.full_residual <= 1e-10, "max |B - X_N| at N=2^J is " + fmt(r.full_residual, 3));
  w.contract("besov_median_decreasing", r.besov_median_monotone, "Bes(ab-eps,p) residual medians non-increasing within 5%");
  w.contract("holder_median_decreasing", r.holder_median_monotone, "Hoelder residual medians non-increasing within 5%");
  w.contract("residual_variance_decreasing", r.residual_variance_monotone, "exact tail sums non-increasing in N");
  w.finish(Json{{"params", io::params_json(params)},
                {"level", c.level},
                {"seed", c.seed},
                {"n_paths", *c.n_paths},
                {"basis", "cholesky_innovations"}},
           out);
}

void cmd_holder(const RunConfig& c, std::ostream& out) {
  const ProcessParams params = make_params(c);
  const auto r = run_holder_corollary(params, c.level, c.truncations, *c.gamma, *c.n_paths, c.seed, c.threads);
  RunWriter w(c);
  write_truncation_outputs(w, r, false);
  w.contract("zero_at_full_N", r.full_residual <= 1e-10, "max |B - X_N| at N=2^J is " + fmt(r.full_residual, 3));
  w.contract("holder_median_decreasing", r.holder_median_monotone, "Hoelder residual medians non-increasing within 5%");
  w.finish(Json{{"params", io::params_json(params)},
                {"level", c.level},
                {"seed", c.seed},
                {"n_paths", *c.n_paths},
                {"basis", "cholesky_innovations"}},
           out);
}

}  // namespace

void resolve(RunConfig& c) {
  if (std::find(kCommands.begin(), kCommands.end(), c.command) == kCommands.end())
    throw ConfigError("unknown command '" + c.command + "'");
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw ConfigError("--alpha must lie in (0,1), got " + fmt(c.alpha));
  if (!(c.beta > 0.0 && c.beta <= 1.0)) throw ConfigError("--beta must lie in (0,1], got " + fmt(c.beta));
  try {
    make_params(c);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (c.level < 1) throw ConfigError("--level must be at least 1");
  if (c.level > kMaxLevel && !c.allow_large)
    throw ConfigError("--level " + std::to_string(c.level) + " exceeds " + std::to_string(kMaxLevel) + "; pass --allow-large");
  if (c.format != "csv" && c.format != "json") throw ConfigError("--format must be csv or json");

  const std::string& cmd = c.command;
  if (!c.p) {
    if (cmd == "besov") c.p = 6.0;
    else if (cmd == "ito-nisio") c.p = 40.0;
    else c.p = 2.0;
  }
  if (!(*c.p > 0.0)) throw ConfigError("--p must be positive");
  if (!c.n_paths) {
    if (cmd == "lln") c.n_paths = 200;
    else if (cmd == "besov") c.n_paths = 100;
    else if (cmd == "ito-nisio" || cmd == "holder") c.n_paths = 50;
    else c.n_paths = 1;
  }
  if (*c.n_paths < 1) throw ConfigError("--paths must be at least 1");
  if ((cmd == "ito-nisio" || cmd == "holder") && !c.gamma) c.gamma = 0.5;
  if ((cmd == "ito-nisio" || cmd == "holder") && c.truncations.empty()) {
    const std::size_t full = std::size_t{1} << c.level;
    for (std::size_t n = full >> std::min(c.level, 4); n <= full; n *= 2) c.truncations.push_back(n);
  }
  if (cmd == "lln" && c.level < 6) throw ConfigError("lln needs --level >= 6");
  if ((cmd == "besov") && c.level < 4) throw ConfigError("besov needs --level >= 4");
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Bifractional Brownian motion: exact sampling, Schauder coefficients, Besov regularity experiments"};
  app.set_config("--config", "", "plain-text key=value file; flags override it");
  app.add_option("command", c.command, "sample | coeffs | besov | moments | lln | ito-nisio | holder")->required();
  app.add_option("--alpha", c.alpha, "alpha in (0,1)");
  app.add_option("--beta", c.beta, "beta in (0,1]");
  app.add_option("--kernel", c.kernel, "bifractional | fractional | subfractional");
  app.add_option("--level", c.level, "dyadic grid level J");
  double p = 0, gamma = 0;
  std::size_t n_paths = 0;
  auto* p_opt = app.add_option("--p", p, "integrability / moment order p");
  auto* gamma_opt = app.add_option("--gamma", gamma, "regularity index gamma");
  app.add_option("--offsets", c.gamma_offsets, "gamma offsets from alpha*beta (besov)")->delimiter(',');
  app.add_option("--eps,--epsilon", c.epsilon, "epsilon of the Besov index alpha*beta - eps (ito-nisio)");
  auto* paths_opt = app.add_option("--paths", n_paths, "number of Monte Carlo paths");
  app.add_option("--seed", c.seed, "run seed");
  app.add_option("--truncations", c.truncations, "increasing truncation list ending at 2^J")->delimiter(',');
  app.add_option("--out", c.out, "output directory");
  app.add_option("--format", c.format, "csv | json");
  app.add_option("--input", c.input, "t,value CSV path (coeffs)");
  app.add_option("--threads", c.threads, "worker cap, 0 = all cores");
  app.add_flag("--allow-large", c.allow_large, "permit --level above the hard cap");
  app.add_flag("--jitter", c.jitter, "add 1e-12 to the Gram diagonal (recorded in the manifest)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  if (p_opt->count()) c.p = p;
  if (gamma_opt->count()) c.gamma = gamma;
  if (paths_opt->count()) c.n_paths = n_paths;

  try {
    resolve(c);
    if (c.command == "sample") cmd_sample(c, out);
    else if (c.command == "coeffs") cmd_coeffs(c, out);
    else if (c.command == "besov") cmd_besov(c, out);
    else if (c.command == "moments") cmd_moments(c, out);
    else if (c.command == "lln") cmd_lln(c, out);
    else if (c.command == "ito-nisio") cmd_ito_nisio(c, out);
    else if (c.command == "holder") cmd_holder(c, out);
  } catch (const NotPositiveDefinite& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::logic_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace bbm::cli
