#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rfic/disorder.hpp"
#include "rfic/stats.hpp"

namespace rfic {

/// Row/column index of a spin value: +1 -> 0, -1 -> 1.
constexpr std::size_t spin_index(int spin) noexcept { return spin > 0 ? 0 : 1; }

struct ChainParams {
  double J = 0.0;
  int a = +1;  // sigma_0
  int b = +1;  // sigma_N

  /// Throws std::invalid_argument on non-finite J or spins outside {-1, +1}.
  void validate() const;
};

using Matrix2 = std::array<std::array<double, 2>, 2>;

/// Transfer matrix M(h) with M[c][s] = exp(-2J 1{c != s} + s h), so that
/// Z_N^{a,b} = (M(h_1) ... M(h_N))[a][b]. Only params.J is used.
Matrix2 step_matrix(double h, const ChainParams& params);

/// Row a of the running transfer-matrix product, kept with its largest entry
/// equal to one (log entries <= 0, max exactly 0) and the subtracted logs
/// accumulated in a running log-normalisation.
///
/// With derivatives enabled the normaliser is treated as a function of J: the
/// companions hold the first and second J-derivatives of the normalised row
/// and the derivatives of the log-normalisation are accumulated separately, so
/// d/dJ log Z is a sum of O(1) terms instead of a difference of O(N^2) ones.
class LogChainState {
 public:
  LogChainState(double J, int start_spin, bool with_derivatives = false);

  /// Multiplies the row on the right by M(h).
  void advance(double h) noexcept { advance(h, std::exp(2.0 * h)); }

  /// Same with e2 = exp(2h) supplied by the caller.
  void advance(double h, double e2) noexcept {
    const double x = x_;
    const double s0 = w_[0] + x * w_[1];
    const double s1 = w_[1] + x * w_[0];
    const bool up_wins = e2 * s0 >= s1;  // e^{h} s0 >= e^{-h} s1
    ++steps_;

    if (!derivatives_) {
      if (up_wins) {
        log_norm_ += h + std::log(s0);
        w_[0] = 1.0;
        w_[1] = s1 / (e2 * s0);
      } else {
        log_norm_ += -h + std::log(s1);
        w_[0] = e2 * s0 / s1;
        w_[1] = 1.0;
      }
      return;
    }

    const double ds0 = dw_[0] + x * dw_[1] - 2.0 * x * w_[1];
    const double ds1 = dw_[1] + x * dw_[0] - 2.0 * x * w_[0];
    const double dds0 = ddw_[0] + x * ddw_[1] - 4.0 * x * dw_[1] + 4.0 * x * w_[1];
    const double dds1 = ddw_[1] + x * ddw_[0] - 4.0 * x * dw_[0] + 4.0 * x * w_[0];

    // k is the winning entry; quotient q = s_other / s_k and its J-derivatives.
    const std::size_t k = up_wins ? 0 : 1;
    const double sk = up_wins ? s0 : s1, dsk = up_wins ? ds0 : ds1, ddsk = up_wins ? dds0 : dds1;
    const double so = up_wins ? s1 : s0, dso = up_wins ? ds1 : ds0, ddso = up_wins ? dds1 : dds0;
    const double rho = up_wins ? 1.0 / e2 : e2;

    const double g = dsk / sk;
    log_norm_ += (up_wins ? h : -h) + std::log(sk);
    dlog_norm_ += g;
    ddlog_norm_ += ddsk / sk - g * g;

    const double q = so / sk;
    const double dq = (dso - q * dsk) / sk;
    const double ddq = (ddso - 2.0 * dq * dsk - q * ddsk) / sk;

    w_[k] = 1.0;
    dw_[k] = 0.0;
    ddw_[k] = 0.0;
    w_[1 - k] = up_wins ? s1 / (e2 * s0) : e2 * s0 / s1;  // same rounding as the plain path
    dw_[1 - k] = rho * dq;
    ddw_[1 - k] = rho * ddq;
  }

  /// log of the unnormalised entry (product)[a][end_spin].
  double log_weight(int end_spin) const noexcept {
    return log_norm_ + std::log(w_[spin_index(end_spin)]);
  }
  /// d/dJ of log_weight; requires derivatives.
  double dlog_weight(int end_spin) const noexcept;
  /// d^2/dJ^2 of log_weight; requires derivatives.
  double d2log_weight(int end_spin) const noexcept;

  std::array<double, 2> logvec() const noexcept { return {std::log(w_[0]), std::log(w_[1])}; }
  double lognorm() const noexcept { return log_norm_; }
  bool has_derivatives() const noexcept { return derivatives_; }
  std::size_t steps() const noexcept { return steps_; }

 private:
  double x_;  // e^{-2J}
  bool derivatives_;
  std::array<double, 2> w_{};
  std::array<double, 2> dw_{};
  std::array<double, 2> ddw_{};
  double log_norm_ = 0.0;
  double dlog_norm_ = 0.0;
  double ddlog_norm_ = 0.0;
  std::size_t steps_ = 0;
};

/// 1-based inclusive site range {first, ..., last}.
struct SiteRange {
  std::size_t first = 1;
  std::size_t last = 1;
};

/// log Z_{N,h}^{a,b}(J) for the whole sequence.
double log_partition(std::span<const double> h, const ChainParams& params);

/// log Z_{first,last,h}^{a,b}(J): the chain on {first-1, ..., last} with
/// sigma_{first-1} = a and sigma_last = b.
double log_partition(std::span<const double> h, const ChainParams& params, SiteRange range);

struct LogPartitionDerivatives {
  double value = 0.0;  // log Z
  double d1 = 0.0;     // d/dJ log Z
  double d2 = 0.0;     // d^2/dJ^2 log Z
};

LogPartitionDerivatives log_partition_derivatives(std::span<const double> h,
                                                  const ChainParams& params);

/// Mean and variance (under the Gibbs measure) of the density of spin flips.
struct FlipDensityReport {
  double mean_density = 0.0;
  double variance_density = 0.0;
  std::size_t N = 0;
};

FlipDensityReport flip_observables(std::span<const double> h, const ChainParams& params);

struct FreeEnergyEstimate {
  double value = 0.0;  // per site
  double std_error = 0.0;
  std::size_t chain_length = 0;
  std::size_t replicas = 0;
  std::uint64_t seed = 0;
};

struct ChainRunConfig {
  std::size_t chain_length = 0;  // sites of the (possibly coarse) chain
  std::size_t replicas = 32;
  std::uint64_t seed = 0;
  int a = +1;
  int b = +1;
  std::size_t block = 1;         // fields are sums of `block` consecutive draws
  bool derivatives = false;
};

/// Totals for one replica at one J: log Z and its J-derivatives.
struct ReplicaTotals {
  double log_z = 0.0;
  double dlog_z = 0.0;
  double d2log_z = 0.0;
};

/// Runs every replica over every J in J_grid. Replica r draws its fields from
/// stream r of `seed`, shared by all J (common random numbers), so results are
/// indexed [replica][J] and independent of the worker count.
std::vector<std::vector<ReplicaTotals>> run_replicas(const DisorderLaw& law,
                                                     std::span<const double> J_grid,
                                                     const ChainRunConfig& config);

inline constexpr std::size_t kMinFreeEnergyChain = 1000;

FreeEnergyEstimate free_energy(const DisorderLaw& law, double J, std::size_t chain_length,
                               std::size_t replicas, std::uint64_t seed, int a = +1, int b = +1);

/// (1/N) log Z on a single given field realisation (std_error = 0).
FreeEnergyEstimate free_energy_of_fields(std::span<const double> h, const ChainParams& params);

/// Replica mean of the flip density -1/2 (1/N) d/dJ log Z: estimates -F'(J)/2.
Estimate flip_density_limit(const DisorderLaw& law, double J, std::size_t chain_length,
                            std::size_t replicas, std::uint64_t seed);

}  // namespace rfic
