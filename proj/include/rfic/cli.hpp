#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rfic/disorder.hpp"

namespace rfic::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitVerification = 3;

/// A configuration problem. what() starts with the offending field name.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Command { Fe, Flips, Continuum, W1, VerifyBounds, Sweep, Sandwich };

std::string_view to_string(Command c);
Command command_from_string(std::string_view name);

struct RunConfig {
  Command command = Command::Fe;
  std::optional<DisorderLaw> law;
  std::vector<double> J_grid;
  std::size_t N = 10'000'000;
  std::size_t replicas = 32;
  std::optional<std::uint64_t> seed;
  int a = +1;
  int b = +1;
  bool all_boundaries = true;          // verify-bounds: check all four (a, b)
  std::vector<std::size_t> L;          // block length(s)
  std::optional<double> M;
  std::size_t trials = 10'000;
  std::size_t samples = 1u << 16;      // w1 sample size
  std::size_t grid = 4096;             // sandwich Brownian grid
  std::size_t blocks = 20'000;         // sandwich Brownian blocks
  std::optional<std::string> out;
  std::optional<std::string> json;
  std::optional<std::string> svg;

  /// Canonical form of everything that affects the numbers (no output paths).
  nlohmann::json canonical() const;
  std::uint64_t hash() const;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);

/// Builds a config from a JSON object (the --config file format). Keys match
/// the long flag names with '-' replaced by '_'.
RunConfig config_from_json(Command command, const nlohmann::json& j);

/// `# rfic <cmd> config_hash=<hex> seed=<seed>`
std::string header_line(const RunConfig& config);

/// Executes one command. CSV goes to config.out or, if unset, to `out`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv-style arguments (without the program name) and runs.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rfic::cli
