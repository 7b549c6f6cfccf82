#include "bbm/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bbm::io {

namespace {

std::ofstream open_out(const std::filesystem::path& file) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + file.string() + " for writing");
  return out;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json numbers(const std::vector<double>& vs) {
  Json a = Json::array();
  for (double v : vs) a.push_back(number(v));
  return a;
}

Json params_json(const ProcessParams& params) {
  return Json{{"kernel", std::string(to_string(params.kind()))},
              {"alpha", params.alpha()},
              {"beta", params.beta()},
              {"hurst", params.hurst()}};
}

Json besov_report_json(const BesovReport& report) {
  return Json{{"gamma", report.gamma},
              {"p", report.p},
              {"level_terms", numbers(report.level_terms)},
              {"seq_norm", number(report.seq_norm)},
              {"slope", number(report.slope)}};
}

Json lemma_check_json(const LemmaCheck& check, const ProcessParams& params) {
  return Json{{"lemma", check.lemma},
              {"params", params_json(params)},
              {"j", check.level},
              {"lhs", number(check.lhs)},
              {"rhs", number(check.rhs)},
              {"pass", check.pass}};
}

void write_path_csv(const std::filesystem::path& file, const PathSample& path) {
  auto out = open_out(file);
  out << "t,value\n";
  for (std::size_t i = 0; i < path.values.size(); ++i)
    out << format_double(path.grid.point(i)) << ',' << format_double(path.values[i]) << '\n';
}

std::vector<double> read_path_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::invalid_argument("cannot open " + file.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,value", 0) != 0)
    throw std::invalid_argument(file.string() + ": expected header 't,value'");
  std::vector<double> ts;
  std::vector<double> vs;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument(file.string() + ": malformed row '" + line + "'");
    try {
      ts.push_back(std::stod(line.substr(0, comma)));
      vs.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::logic_error&) {
      throw std::invalid_argument(file.string() + ": malformed row '" + line + "'");
    }
  }
  const DyadicGrid grid(level_from_size(vs.size()));
  for (std::size_t i = 0; i < ts.size(); ++i)
    if (std::abs(ts[i] - grid.point(i)) > 1e-12)
      throw std::invalid_argument(file.string() + ": times are not the dyadic grid i/2^J");
  return vs;
}

void write_coeffs_csv(const std::filesystem::path& file, const SchauderCoeffs& coeffs) {
  auto out = open_out(file);
  out << "j,k,f_jk\n";
  for (std::size_t j = 0; j < coeffs.levels.size(); ++j)
    for (std::size_t k = 0; k < coeffs.levels[j].size(); ++k)
      out << j << ',' << k + 1 << ',' << format_double(coeffs.levels[j][k]) << '\n';
}

void write_matrix_csv(const std::filesystem::path& file, const Matrix& m) {
  auto out = open_out(file);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
}

void write_table_csv(const std::filesystem::path& file, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
  auto out = open_out(file);
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_double(row[c]);
    out << '\n';
  }
}

void write_json(const std::filesystem::path& file, const Json& j) {
  auto out = open_out(file);
  out << j.dump(2) << '\n';
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  auto out = open_out(file);
  out << text;
}

}  // namespace bbm::io
