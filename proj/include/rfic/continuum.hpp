#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rfic/stats.hpp"

namespace rfic {

/// Continuum free energy F(J) = x K1(x) / K0(x), x = e^{-2J}, next to its
/// large-J asymptote 1 / (2J + log 2 - gamma_EM).
struct ContinuumEval {
  double J = 0.0;
  double x = 0.0;
  double F_exact = 0.0;
  double F_asym = 0.0;
  double gap = 0.0;  // |F_exact - F_asym|
};

/// Defined for every finite J. For J < 0 (x > 1) the ratio comes from the
/// continued fraction; F_asym is only meaningful for large positive J.
ContinuumEval continuum_free_energy(double J);

/// 1 / (2J + log 2 - gamma_EM).
double continuum_asymptote(double J);

/// Brownian path on G+1 equally spaced points of [0, 1], starting at 0.
struct BrownianBlock {
  std::vector<double> grid;
  double B1 = 0.0;  // endpoint
  double H = 0.0;   // max |B_s - B_t| over grid pairs = max - min
};

BrownianBlock sample_brownian_block(std::size_t G, std::uint64_t seed, std::uint64_t stream = 0,
                                    double theta = 1.0);

/// Wraps an existing grid path (grid[0] must be 0).
BrownianBlock brownian_block_from_grid(std::vector<double> grid);

/// Grid ranges H of n independent blocks; block i uses stream i.
std::vector<double> sample_brownian_ranges(std::size_t G, std::size_t n, std::uint64_t seed,
                                           double theta = 1.0);

/// Continuum block partition function on [0, 1] with jumps snapped to grid
/// sites and at most jmax jumps in total.
struct BlockZ {
  double value = 0.0;
  /// Upper bound on the omitted j > jmax terms:
  /// e^{b B1} y^{jmax+1} / (jmax+1)! e^y with y = e^{-2J} e^{2H}.
  double truncation_bound = 0.0;
};

inline constexpr std::size_t kDefaultJumpCutoff = 6;

BlockZ continuum_block_z(const BrownianBlock& block, double J, int a, int b,
                         std::size_t jmax = kDefaultJumpCutoff);

/// One-block continuum lower/upper bounds, compared on log scale.
std::vector<BlockBoundReport> verify_continuum_block_bounds(const BrownianBlock& block, double J,
                                                            int a, int b, double M,
                                                            std::size_t jmax = kDefaultJumpCutoff);

struct ScalingReport {
  double J = 0.0;
  double theta = 0.0;
  double scaled = 0.0;  // theta^2 F(J + log theta)
  double direct = 0.0;  // theta^2 x K1(x)/K0(x) with x = e^{-2J} / theta^2
  double rel_diff = 0.0;
  bool pass = false;    // rel_diff <= 1e-12
};

/// F_theta(J) = theta^2 F(J + log theta), compared against direct Bessel evaluation.
ScalingReport scaling_identity_check(double J, double theta);

/// Monte Carlo statistics of the block range H that enter the continuum
/// comparison bounds, for threshold M and coupling J.
struct RangeTailStats {
  Estimate excess;         // E[(H - M)_+]
  Estimate prob;           // P[H > M]
  Estimate second_moment;  // E[H^2]
  Estimate upper_err;      // E[2 (H - M)_+]
  Estimate lower_err;      // E[(2 (H - M) + e^{2(H - M - J)}) 1{H > M}]
  std::size_t samples = 0;
};

/// shift is added to every H before the statistics are formed (a grid
/// discretisation allowance; 0 for raw grid statistics).
RangeTailStats range_tail_stats(std::span<const double> ranges, double M, double J,
                                double shift = 0.0);

/// Allowance for the grid underestimating the path range: 2 sqrt(2 log G / G).
double grid_range_allowance(std::size_t G);

}  // namespace rfic
