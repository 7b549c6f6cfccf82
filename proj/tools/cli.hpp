#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bbm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Largest grid level accepted without --allow-large.
inline constexpr int kMaxLevel = 13;

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Fully resolved settings of one command run.
struct RunConfig {
  std::string command;
  double alpha = 0.5;
  double beta = 1.0;
  std::string kernel = "bifractional";
  int level = 8;
  std::optional<double> p;
  std::optional<double> gamma;
  std::vector<double> gamma_offsets{-0.05, 0.0, 0.05};
  double epsilon = 0.05;
  std::optional<std::size_t> n_paths;
  std::uint64_t seed = 0;
  std::vector<std::size_t> truncations;
  std::string out = "bbm-out";
  std::string format = "csv";
  std::string input;
  unsigned threads = 0;
  bool allow_large = false;
  bool jitter = false;
};

/// Fills command-dependent defaults and checks every range. Throws ConfigError.
void resolve(RunConfig& config);

/// Parses argv (flags override an optional --config key=value file), runs the
/// command and returns the process exit code. Summary goes to `out`,
/// diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bbm::cli
