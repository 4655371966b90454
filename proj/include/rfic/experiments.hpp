#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rfic/chain.hpp"
#include "rfic/coarsegrain.hpp"
#include "rfic/disorder.hpp"
#include "rfic/stats.hpp"

namespace rfic {

/// Free energy and flip density over a J grid, with the rescaled quantities
/// 2J F(J) and 4J^2 density(J) that approach theta^2 as J grows.
struct SweepResult {
  DisorderLaw law;
  std::vector<double> J_grid;
  std::vector<FreeEnergyEstimate> F_hat;
  std::vector<Estimate> flip_density;  // empty when flips were not requested
  std::vector<double> coeff;           // 2J F_hat
  std::vector<double> coeff_err;
  std::vector<double> flip_coeff;      // 4J^2 density; NaN without flips
  std::vector<double> flip_coeff_err;
  double fitted_rate = 0.0;            // log-log slope of |coeff - theta^2| against J
  std::size_t chain_length = 0;
  std::size_t replicas = 0;
  std::uint64_t seed = 0;
};

/// Every J shares the replica streams, so the differences between grid points
/// carry less noise than the points themselves.
SweepResult leading_coefficient_sweep(const DisorderLaw& law, std::span<const double> J_grid,
                                      std::size_t chain_length, std::size_t replicas,
                                      std::uint64_t seed, bool with_flips = true);

/// Four successive gaps of F_mu(J) ~ F_{mu^{*L}}(J)/L ~ F_{N(L theta^2)}(J)/L
/// ~ F_{N(theta^2)}(J) ~ theta^2/(2J).
struct ApproximationChainReport {
  double J = 0.0;
  std::size_t L = 0;
  double M = 0.0;
  std::array<Estimate, 5> stage{};  // the five quantities above, in order
  std::array<Estimate, 4> gap{};    // stage[k] - stage[k+1]
  Estimate w1_over_L;               // W1(mu^{*L}, N(L theta^2)) / L
  bool gap2_within_w1 = false;      // |gap[1]| <= w1_over_L + 3 sigma
};

struct ApproximationChainConfig {
  std::size_t chain_length = 1u << 20;  // fine sites
  std::size_t replicas = 16;
  std::uint64_t seed = 0;
  std::optional<std::size_t> L;  // overrides the schedule
  std::size_t w1_samples = 1u << 16;
};

ApproximationChainReport approximation_chain_report(const DisorderLaw& law, double J,
                                                    const ApproximationChainConfig& config);

/// One J of the Gaussian sandwich against the continuum free energy.
struct SandwichRow {
  double J = 0.0;
  double M = 0.0;
  FreeEnergyEstimate F_hat;
  double F_plus = 0.0;   // continuum F(J + M)
  double F_minus = 0.0;  // continuum F(J - M)
  Estimate upper_err;    // E[2 (H - M)_+]
  Estimate lower_err;    // e^{-2J} + E[(2 (H - M) + e^{2(H - M - J)}) 1{H > M}]
  Estimate lower;        // F_plus - lower_err
  Estimate upper;        // F_minus + upper_err
  bool lower_pass = false;
  bool upper_pass = false;
  bool pass() const { return lower_pass && upper_pass; }
};

struct SandwichConfig {
  std::size_t chain_length = 1u << 20;
  std::size_t replicas = 16;
  std::uint64_t seed = 0;
  std::size_t grid = 4096;        // Brownian grid points per unit block
  std::size_t blocks = 20000;     // Brownian blocks for the tail terms
  std::optional<double> M;        // overrides 6 sqrt(log J)
};

/// 6 sqrt(log J).
double sandwich_threshold(double J);

std::vector<SandwichRow> sandwich_test_gaussian(std::span<const double> J_grid,
                                                const SandwichConfig& config);

/// Flip density at J two ways on the same replicas: the propagated derivative
/// and the bracket [-(F(J+d)-F(J))/(2d), -(F(J)-F(J-d))/(2d)] that convexity of
/// (1/N) log Z in J guarantees realisation by realisation.
struct DerivativeBracket {
  double J = 0.0;
  double delta = 0.0;
  Estimate propagated;
  Estimate lower;
  Estimate upper;
  bool bracketed = false;  // lower <= propagated <= upper for every replica
};

DerivativeBracket derivative_bracket(const DisorderLaw& law, double J, double delta,
                                     std::size_t chain_length, std::size_t replicas,
                                     std::uint64_t seed);

/// "%.17g".
std::string format_number(double v);

/// Columns J,F_hat,stderr,coeff,flip_coeff.
void write_sweep_csv(std::ostream& out, const SweepResult& result);

nlohmann::json to_json(const SweepResult& result);

}  // namespace rfic
