#pragma once

#include "bbm/covariance.hpp"
#include "bbm/matrix.hpp"
#include "bbm/moments.hpp"
#include "bbm/sampling.hpp"
#include "bbm/schauder.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace bbm::io {

using Json = nlohmann::ordered_json;

/// Shortest-roundtrip-safe decimal with 17 significant digits, '.' separator.
std::string format_double(double v);

/// Non-finite values become null.
Json number(double v);
Json numbers(const std::vector<double>& vs);

Json params_json(const ProcessParams& params);
Json besov_report_json(const BesovReport& report);
Json lemma_check_json(const LemmaCheck& check, const ProcessParams& params);

/// Header `t,value`, one row per grid point.
void write_path_csv(const std::filesystem::path& file, const PathSample& path);
/// Reads a `t,value` file written by write_path_csv; checks the grid is dyadic.
std::vector<double> read_path_csv(const std::filesystem::path& file);

/// Rows `j,k,f_jk` with k starting at 1.
void write_coeffs_csv(const std::filesystem::path& file, const SchauderCoeffs& coeffs);

void write_matrix_csv(const std::filesystem::path& file, const Matrix& m);

/// Writes a header line and then each row joined by commas.
void write_table_csv(const std::filesystem::path& file, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);

void write_json(const std::filesystem::path& file, const Json& j);
void write_text(const std::filesystem::path& file, const std::string& text);

}  // namespace bbm::io
