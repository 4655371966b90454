#include "rfic/continuum.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <stdexcept>

#include "rfic/bessel.hpp"
#include "rfic/parallel.hpp"
#include "rfic/rng.hpp"

namespace rfic {

ContinuumEval continuum_free_energy(double J) {
  if (!std::isfinite(J)) throw std::invalid_argument("J: must be finite");
  ContinuumEval e;
  e.J = J;
  e.x = std::exp(-2.0 * J);
  e.F_exact = bessel_ratio_xk1_k0(-2.0 * J);
  e.F_asym = continuum_asymptote(J);
  e.gap = std::abs(e.F_exact - e.F_asym);
  return e;
}

double continuum_asymptote(double J) { return 1.0 / (2.0 * J + kLog2 - kEulerGamma); }

BrownianBlock brownian_block_from_grid(std::vector<double> grid) {
  if (grid.size() < 3) throw std::invalid_argument("G: need at least 2 increments");
  if (grid.front() != 0.0) throw std::invalid_argument("grid: path must start at 0");
  const auto [lo, hi] = std::minmax_element(grid.begin(), grid.end());
  BrownianBlock block;
  block.B1 = grid.back();
  block.H = *hi - *lo;
  block.grid = std::move(grid);
  return block;
}

BrownianBlock sample_brownian_block(std::size_t G, std::uint64_t seed, std::uint64_t stream,
                                    double theta) {
  if (G < 2) throw std::invalid_argument("G: must be >= 2");
  Rng rng(seed, stream);
  std::normal_distribution<double> normal;
  const double step = theta / std::sqrt(static_cast<double>(G));
  std::vector<double> grid(G + 1);
  grid[0] = 0.0;
  for (std::size_t i = 1; i <= G; ++i) grid[i] = grid[i - 1] + step * normal(rng);
  return brownian_block_from_grid(std::move(grid));
}

std::vector<double> sample_brownian_ranges(std::size_t G, std::size_t n, std::uint64_t seed,
                                           double theta) {
  if (G < 2) throw std::invalid_argument("G: must be >= 2");
  std::vector<double> ranges(n);
  parallel_for(n, [&](std::size_t i) {
    Rng rng(seed, i);
    std::normal_distribution<double> normal;
    const double step = theta / std::sqrt(static_cast<double>(G));
    double b = 0.0, lo = 0.0, hi = 0.0;
    for (std::size_t k = 0; k < G; ++k) {
      b += step * normal(rng);
      lo = std::min(lo, b);
      hi = std::max(hi, b);
    }
    ranges[i] = hi - lo;
  });
  return ranges;
}

BlockZ continuum_block_z(const BrownianBlock& block, double J, int a, int b, std::size_t jmax) {
  if (jmax < 2) throw std::invalid_argument("jmax: must be >= 2");
  if ((a != 1 && a != -1) || (b != 1 && b != -1))
    throw std::invalid_argument("a, b: spins must be +1 or -1");
  if (!std::isfinite(J)) throw std::invalid_argument("J: must be finite");

  const std::size_t G = block.grid.size() - 1;
  const double x = std::exp(-2.0 * J);
  const double rate = x / static_cast<double>(G);

  // m jumps at one site carry weight rate^m / m!.
  std::vector<double> jump_weight(jmax + 1);
  jump_weight[0] = 1.0;
  for (std::size_t m = 1; m <= jmax; ++m) jump_weight[m] = jump_weight[m - 1] * rate / static_cast<double>(m);

  // weight[s][c]: paths ending in spin s after c jumps so far.
  std::array<std::vector<double>, 2> weight{std::vector<double>(jmax + 1, 0.0),
                                            std::vector<double>(jmax + 1, 0.0)};
  std::array<std::vector<double>, 2> next = weight;
  weight[a > 0 ? 0 : 1][0] = 1.0;

  for (std::size_t k = 0; k < G; ++k) {
    // jumps at time k/G, then the spin collects s * (B_{(k+1)/G} - B_{k/G})
    for (auto& row : next) std::fill(row.begin(), row.end(), 0.0);
    for (std::size_t s = 0; s < 2; ++s) {
      for (std::size_t c = 0; c <= jmax; ++c) {
        const double w = weight[s][c];
        if (w == 0.0) continue;
        for (std::size_t m = 0; c + m <= jmax; ++m) {
          const std::size_t s2 = (m % 2 == 0) ? s : 1 - s;
          next[s2][c + m] += w * jump_weight[m];
        }
      }
    }
    const double dB = block.grid[k + 1] - block.grid[k];
    const double up = std::exp(dB), down = std::exp(-dB);
    for (std::size_t c = 0; c <= jmax; ++c) {
      next[0][c] *= up;
      next[1][c] *= down;
    }
    std::swap(weight, next);
  }

  BlockZ out;
  const auto& end_row = weight[b > 0 ? 0 : 1];
  for (double w : end_row) out.value += w;

  const double y = x * std::exp(2.0 * block.H);
  const double log_tail = b * block.B1 + static_cast<double>(jmax + 1) * std::log(y) -
                          std::lgamma(static_cast<double>(jmax + 2)) + y;
  out.truncation_bound = std::exp(log_tail);
  return out;
}

std::vector<BlockBoundReport> verify_continuum_block_bounds(const BrownianBlock& block, double J,
                                                            int a, int b, double M,
                                                            std::size_t jmax) {
  if (!(M >= 0.0)) throw std::invalid_argument("M: must be >= 0");
  const auto z = continuum_block_z(block, J, a, b, jmax);
  const double log_z = std::log(z.value);
  const double flip = a != b ? 1.0 : 0.0;
  const double excess = std::max(0.0, block.H - M);
  const double lower = -2.0 * (J + M) * flip + b * block.B1 - 2.0 * excess;
  const double upper = -2.0 * (J - M) * flip + b * block.B1 + 2.0 * excess + std::exp(2.0 * (block.H - J));
  return {make_bound_report(InequalityId::ContinuumLower, lower, log_z),
          make_bound_report(InequalityId::ContinuumUpper, log_z, upper)};
}

ScalingReport scaling_identity_check(double J, double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) throw std::invalid_argument("theta: must be > 0");
  ScalingReport r;
  r.J = J;
  r.theta = theta;
  const double t2 = theta * theta;
  r.scaled = t2 * continuum_free_energy(J + std::log(theta)).F_exact;
  const double x = std::exp(-2.0 * J) / t2;
  r.direct = t2 * x * bessel_k1(x) / bessel_k0(x);
  r.rel_diff = std::abs(r.scaled - r.direct) / std::abs(r.direct);
  r.pass = r.rel_diff <= 1e-12;
  return r;
}

RangeTailStats range_tail_stats(std::span<const double> ranges, double M, double J, double shift) {
  if (ranges.empty()) throw std::invalid_argument("ranges: empty");
  const std::size_t n = ranges.size();
  std::vector<double> excess(n), prob(n), second(n), lower(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double H = ranges[i] + shift;
    const bool above = H > M;
    excess[i] = std::max(0.0, H - M);
    prob[i] = above ? 1.0 : 0.0;
    second[i] = H * H;
    lower[i] = above ? 2.0 * (H - M) + std::exp(2.0 * (H - M - J)) : 0.0;
  }
  RangeTailStats s;
  s.excess = mean_with_stderr(excess);
  s.prob = mean_with_stderr(prob);
  s.second_moment = mean_with_stderr(second);
  s.upper_err = 2.0 * s.excess;
  s.lower_err = mean_with_stderr(lower);
  s.samples = n;
  return s;
}

double grid_range_allowance(std::size_t G) {
  const double g = static_cast<double>(G);
  return 2.0 * std::sqrt(2.0 * std::log(g) / g);
}

}  // namespace rfic
