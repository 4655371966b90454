#include "rfic/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

#include "rfic/continuum.hpp"

namespace rfic {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Per-replica (1/n) log Z at grid point j.
std::vector<double> per_site(const std::vector<std::vector<ReplicaTotals>>& totals, std::size_t j,
                             std::size_t n, double scale = 1.0) {
  std::vector<double> out(totals.size());
  for (std::size_t r = 0; r < totals.size(); ++r)
    out[r] = scale * totals[r][j].log_z / static_cast<double>(n);
  return out;
}

Estimate paired_difference(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return mean_with_stderr(d);
}

}  // namespace

SweepResult leading_coefficient_sweep(const DisorderLaw& law, std::span<const double> J_grid,
                                      std::size_t chain_length, std::size_t replicas,
                                      std::uint64_t seed, bool with_flips) {
  if (J_grid.size() < 3) throw std::invalid_argument("J_grid: need at least 3 points");
  for (std::size_t i = 1; i < J_grid.size(); ++i)
    if (!(J_grid[i] > J_grid[i - 1])) throw std::invalid_argument("J_grid: must be increasing");
  if (chain_length < kMinFreeEnergyChain)
    throw std::invalid_argument("N: chain length must be >= " +
                                std::to_string(kMinFreeEnergyChain));

  ChainRunConfig config{chain_length, replicas, seed, +1, +1, 1, with_flips};
  const auto totals = run_replicas(law, J_grid, config);

  SweepResult res{law, {J_grid.begin(), J_grid.end()}, {}, {}, {}, {}, {}, {}, 0.0,
                  chain_length, replicas, seed};
  const double n = static_cast<double>(chain_length);
  for (std::size_t j = 0; j < J_grid.size(); ++j) {
    const double J = J_grid[j];
    const auto f = mean_with_stderr(per_site(totals, j, chain_length));
    res.F_hat.push_back({f.value, f.std_error, chain_length, replicas, seed});
    res.coeff.push_back(2.0 * J * f.value);
    res.coeff_err.push_back(2.0 * J * f.std_error);
    if (with_flips) {
      std::vector<double> density(replicas);
      for (std::size_t r = 0; r < replicas; ++r) density[r] = -0.5 * totals[r][j].dlog_z / n;
      const auto d = mean_with_stderr(density);
      res.flip_density.push_back(d);
      res.flip_coeff.push_back(4.0 * J * J * d.value);
      res.flip_coeff_err.push_back(4.0 * J * J * d.std_error);
    } else {
      res.flip_coeff.push_back(kNaN);
      res.flip_coeff_err.push_back(kNaN);
    }
  }

  std::vector<double> xs, ys;
  for (std::size_t j = 0; j < J_grid.size(); ++j) {
    const double r = std::abs(res.coeff[j] - law.variance());
    if (r > 0.0) {
      xs.push_back(J_grid[j]);
      ys.push_back(r);
    }
  }
  res.fitted_rate = xs.size() >= 2 ? log_log_slope(xs, ys) : kNaN;
  return res;
}

ApproximationChainReport approximation_chain_report(const DisorderLaw& law, double J,
                                                    const ApproximationChainConfig& config) {
  if (!(J > 1.0)) throw std::invalid_argument("J: must be > 1");
  const Schedule schedule = schedule_for(law);
  ApproximationChainReport rep;
  rep.J = J;
  rep.L = config.L.value_or(schedule.L(J));
  rep.M = schedule.M(J);
  if (rep.L == 0) throw std::invalid_argument("L: must be >= 1");

  const std::size_t coarse = config.chain_length / rep.L;
  if (coarse == 0) throw std::invalid_argument("N: shorter than one block");
  const std::size_t fine = coarse * rep.L;
  const double L = static_cast<double>(rep.L);
  const double grid[] = {J};
  const auto gaussian = DisorderLaw::gaussian(law.variance());

  auto run = [&](const DisorderLaw& l, std::size_t n, std::size_t block) {
    ChainRunConfig c{n, config.replicas, config.seed, +1, +1, block, false};
    return per_site(run_replicas(l, grid, c), 0, n, 1.0 / static_cast<double>(block));
  };

  // Stages 0/1 and 2/3 share streams: the coarse fields are block sums of the
  // fine ones, so gaps 0 and 2 are paired differences.
  const auto s0 = run(law, fine, 1);
  const auto s1 = run(law, coarse, rep.L);
  const auto s2 = run(gaussian, coarse, rep.L);
  const auto s3 = run(gaussian, fine, 1);

  rep.stage[0] = mean_with_stderr(s0);
  rep.stage[1] = mean_with_stderr(s1);
  rep.stage[2] = mean_with_stderr(s2);
  rep.stage[3] = mean_with_stderr(s3);
  rep.stage[4] = {law.variance() / (2.0 * J), 0.0};
  rep.gap[0] = paired_difference(s0, s1);
  rep.gap[1] = paired_difference(s1, s2);
  rep.gap[2] = paired_difference(s2, s3);
  rep.gap[3] = rep.stage[3] - rep.stage[4];

  const std::size_t Ls[] = {rep.L};
  const auto w1 = w1_clt_curve(law, Ls, config.w1_samples, config.seed ^ 0x57A6E2ull);
  rep.w1_over_L = {w1[0].w1 / L, w1[0].std_error / L};
  rep.gap2_within_w1 =
      std::abs(rep.gap[1].value) <=
      rep.w1_over_L.value + 3.0 * combined_stderr(rep.gap[1].std_error, rep.w1_over_L.std_error);
  return rep;
}

double sandwich_threshold(double J) {
  if (!(J > 1.0)) throw std::invalid_argument("J: must be > 1");
  return 6.0 * std::sqrt(std::log(J));
}

std::vector<SandwichRow> sandwich_test_gaussian(std::span<const double> J_grid,
                                                const SandwichConfig& config) {
  if (J_grid.empty()) throw std::invalid_argument("J_grid: must be non-empty");
  const auto law = DisorderLaw::gaussian(1.0);
  const auto ranges = sample_brownian_ranges(config.grid, config.blocks, config.seed ^ 0xB10Cull);
  const double shift = grid_range_allowance(config.grid);

  std::vector<SandwichRow> rows;
  for (double J : J_grid) {
    if (!(J >= 0.0) || !std::isfinite(J)) throw std::invalid_argument("J_grid: J must be >= 0");
    SandwichRow row;
    row.J = J;
    row.M = config.M ? *config.M : sandwich_threshold(J);
    if (!(row.M >= 0.0)) throw std::invalid_argument("M: must be >= 0");
    row.F_hat = free_energy(law, J, config.chain_length, config.replicas, config.seed);
    row.F_plus = continuum_free_energy(J + row.M).F_exact;
    row.F_minus = continuum_free_energy(J - row.M).F_exact;

    const auto tail = range_tail_stats(ranges, row.M, J, shift);
    row.upper_err = tail.upper_err;
    row.lower_err = {std::exp(-2.0 * J) + tail.lower_err.value, tail.lower_err.std_error};
    row.lower = {row.F_plus - row.lower_err.value, row.lower_err.std_error};
    row.upper = {row.F_minus + row.upper_err.value, row.upper_err.std_error};

    const double f = row.F_hat.value, se = row.F_hat.std_error;
    row.lower_pass = f >= row.lower.value - 3.0 * combined_stderr(se, row.lower.std_error);
    row.upper_pass = f <= row.upper.value + 3.0 * combined_stderr(se, row.upper.std_error);
    rows.push_back(row);
  }
  return rows;
}

DerivativeBracket derivative_bracket(const DisorderLaw& law, double J, double delta,
                                     std::size_t chain_length, std::size_t replicas,
                                     std::uint64_t seed) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta: must be > 0");
  if (chain_length < kMinFreeEnergyChain)
    throw std::invalid_argument("N: chain length must be >= " +
                                std::to_string(kMinFreeEnergyChain));
  const double grid[] = {J - delta, J, J + delta};
  ChainRunConfig config{chain_length, replicas, seed, +1, +1, 1, true};
  const auto totals = run_replicas(law, grid, config);
  const double n = static_cast<double>(chain_length);

  std::vector<double> prop(replicas), lo(replicas), hi(replicas);
  bool ok = true;
  for (std::size_t r = 0; r < replicas; ++r) {
    const double fm = totals[r][0].log_z / n, f0 = totals[r][1].log_z / n,
                 fp = totals[r][2].log_z / n;
    prop[r] = -0.5 * totals[r][1].dlog_z / n;
    lo[r] = -0.5 * (fp - f0) / delta;
    hi[r] = -0.5 * (f0 - fm) / delta;
    // rounding of log Z / N differences, scaled by 1/delta
    const double tol = 64.0 * std::numeric_limits<double>::epsilon() * (std::abs(f0) + 1.0) / delta;
    ok = ok && lo[r] <= prop[r] + tol && prop[r] <= hi[r] + tol;
  }
  return {J, delta, mean_with_stderr(prop), mean_with_stderr(lo), mean_with_stderr(hi), ok};
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  out << "J,F_hat,stderr,coeff,flip_coeff\n";
  for (std::size_t j = 0; j < result.J_grid.size(); ++j) {
    out << format_number(result.J_grid[j]) << ',' << format_number(result.F_hat[j].value) << ','
        << format_number(result.F_hat[j].std_error) << ',' << format_number(result.coeff[j])
        << ',' << format_number(result.flip_coeff[j]) << '\n';
  }
}

nlohmann::json to_json(const SweepResult& result) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t j = 0; j < result.J_grid.size(); ++j) {
    nlohmann::json row{{"J", result.J_grid[j]},
                       {"F_hat", result.F_hat[j].value},
                       {"stderr", result.F_hat[j].std_error},
                       {"coeff", result.coeff[j]},
                       {"coeff_stderr", result.coeff_err[j]}};
    if (!result.flip_density.empty()) {
      row["flip_density"] = result.flip_density[j].value;
      row["flip_density_stderr"] = result.flip_density[j].std_error;
      row["flip_coeff"] = result.flip_coeff[j];
      row["flip_coeff_stderr"] = result.flip_coeff_err[j];
    }
    rows.push_back(row);
  }

  const Schedule s = schedule_for(result.law);
  nlohmann::json schedule{{"regime", s.regime == Regime::ExpMoments ? "exp_moments" : "poly"},
                          {"eta", s.eta}};
  if (std::isfinite(s.p)) schedule["p"] = s.p;
  nlohmann::json sched_rows = nlohmann::json::array();
  for (double J : result.J_grid) {
    if (J > 1.0) sched_rows.push_back({{"J", J}, {"L", s.L(J)}, {"M", s.M(J)},
                                       {"lower_L", s.lower_L(J)}, {"lower_M", s.lower_M(J)}});
  }
  schedule["grid"] = sched_rows;

  return {{"law", result.law.to_json()},
          {"seed", result.seed},
          {"chain_length", result.chain_length},
          {"replicas", result.replicas},
          {"fitted_rate", std::isfinite(result.fitted_rate) ? nlohmann::json(result.fitted_rate)
                                                            : nlohmann::json(nullptr)},
          {"schedule", schedule},
          {"rows", rows}};
}

}  // namespace rfic
