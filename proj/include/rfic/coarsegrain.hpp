#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rfic/disorder.hpp"
#include "rfic/stats.hpp"

namespace rfic {

struct BlockStats {
  std::size_t L = 0;
  double h_block = 0.0;  // h_1 + ... + h_L
  double H_L = 0.0;      // max over windows n <= m of |h_n + ... + h_m|
  double abs_sum = 0.0;  // |h_1| + ... + |h_L|
};

/// O(L) via prefix sums: H_L = max_k S_k - min_k S_k over S_0 = 0, S_1, ..., S_L.
BlockStats block_stats(std::span<const double> h);

/// Consecutive block sums (h^L_1, h^L_2, ...). The length of h must be a
/// multiple of L.
std::vector<double> coarse_fields(std::span<const double> h, std::size_t L);

/// Three reports for a block of L = h.size() sites: exact lower bound, upper
/// bound with the L (4 (H_L - M)_+ + e^{2(M-J)}) error and the revisited
/// upper bound with (L log 2 + 2 sum |h|) 1{H_L > M} + L e^{2(M-J)}.
/// Both sides are on log scale.
std::vector<BlockBoundReport> verify_block_bounds(std::span<const double> h, double J, double M,
                                                  int a, int b);

/// log Z_{NL}^{a,b} assembled from block partition functions by summing over
/// all spin values at the block boundaries L, 2L, ..., (N-1)L. Exponential in
/// N = h.size() / L; intended for small N.
double coarse_grain_log_partition(std::span<const double> h, std::size_t L, double J, int a,
                                  int b);

/// Monte Carlo estimates over n independent blocks of length L.
struct TailExpectation {
  Estimate excess;     // E[(H_L - M)_+]
  Estimate prob;       // P[H_L > M]
  Estimate revisited;  // E[(log 2 + (2/L) sum |h|) 1{H_L > M}]
  std::size_t samples = 0;
};

inline constexpr std::size_t kMinTailSamples = 1000;

TailExpectation tail_expectation(const DisorderLaw& law, std::size_t L, double M, std::size_t n,
                                 std::uint64_t seed);

/// (4 theta^2 L^3 / M) exp(-M^2 / (4 theta^2 L)).
double exp_tail_bound(double variance, std::size_t L, double M);

/// MC estimate of E[H_L^q].
Estimate block_moment(const DisorderLaw& law, std::size_t L, double q, std::size_t n,
                      std::uint64_t seed);

/// Largest t on a scan grid up to `cap` with mgf(s) <= exp(theta^2 s^2) for
/// every scanned 0 < |s| <= t; `cap` when the bound never fails, 0 when the
/// law has no exponential moments.
double subgaussian_radius(const DisorderLaw& law, double cap = 50.0);

/// Default guard constant c = 2 theta^2 c' for thresholds M <= c L.
double threshold_guard(const DisorderLaw& law);

enum class Regime { ExpMoments, Poly };

/// Block length and threshold as functions of J for one moment regime.
///
/// ExpMoments: L = floor(J^{4/3} / (log J)^{1/3}), M = 6 theta J^{2/3} (log J)^{1/3}.
/// Poly, p >= 3: eta = 4p / (3p + 2), L = floor(J^eta), M = J^{2 - eta}.
/// Poly, 2 <= p < 3: eta = 2p(p-1) / (p^2 + p - 1), L = floor(J^{2 eta/(p-1)}), M = J^{2 - eta}.
/// The lower-bound pair differs only for 2 <= p < 3:
/// L = floor(J^{4/p} / (log J)^{1/p}), M = 6 theta J^{2/p} (log J)^{(p-1)/(2p)}.
struct Schedule {
  Regime regime = Regime::ExpMoments;
  double theta = 1.0;
  double p = 0.0;    // +inf for ExpMoments
  double eta = 0.0;  // upper-bound exponent

  std::size_t L(double J) const;
  double M(double J) const;
  std::size_t lower_L(double J) const;
  double lower_M(double J) const;
};

/// Upper-bound exponent for finite p-th moment; throws for p < 2.
double eta_for_p(double p);

/// Throws std::invalid_argument for Poly with p < 2 or theta <= 0.
Schedule schedule_for(Regime regime, double theta, double p);

Regime regime_for(const DisorderLaw& law);
Schedule schedule_for(const DisorderLaw& law);

}  // namespace rfic
