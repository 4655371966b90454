#include "rfic/chain.hpp"

#include <stdexcept>
#include <string>

#include "rfic/parallel.hpp"

namespace rfic {

namespace {

void require_spin(int s, const char* field) {
  if (s != 1 && s != -1) throw std::invalid_argument(std::string(field) + ": spin must be +1 or -1");
}

constexpr std::size_t kFieldChunk = 4096;

}  // namespace

void ChainParams::validate() const {
  if (!std::isfinite(J)) throw std::invalid_argument("J: must be finite");
  require_spin(a, "a");
  require_spin(b, "b");
}

Matrix2 step_matrix(double h, const ChainParams& params) {
  Matrix2 m{};
  const double x = std::exp(-2.0 * params.J);
  for (int c : {+1, -1}) {
    for (int s : {+1, -1}) {
      m[spin_index(c)][spin_index(s)] = (c != s ? x : 1.0) * std::exp(s * h);
    }
  }
  return m;
}

LogChainState::LogChainState(double J, int start_spin, bool with_derivatives)
    : x_(std::exp(-2.0 * J)), derivatives_(with_derivatives) {
  require_spin(start_spin, "a");
  w_[spin_index(start_spin)] = 1.0;
}

double LogChainState::dlog_weight(int end_spin) const noexcept {
  const std::size_t i = spin_index(end_spin);
  return dlog_norm_ + dw_[i] / w_[i];
}

double LogChainState::d2log_weight(int end_spin) const noexcept {
  const std::size_t i = spin_index(end_spin);
  const double r1 = dw_[i] / w_[i];
  return ddlog_norm_ + ddw_[i] / w_[i] - r1 * r1;
}

double log_partition(std::span<const double> h, const ChainParams& params) {
  if (h.empty()) throw std::invalid_argument("range: empty field sequence");
  params.validate();
  LogChainState state(params.J, params.a);
  for (double v : h) state.advance(v);
  return state.log_weight(params.b);
}

double log_partition(std::span<const double> h, const ChainParams& params, SiteRange range) {
  if (range.first < 1 || range.first > range.last || range.last > h.size())
    throw std::invalid_argument("range: need 1 <= first <= last <= " + std::to_string(h.size()) +
                                ", got [" + std::to_string(range.first) + ", " +
                                std::to_string(range.last) + "]");
  return log_partition(h.subspan(range.first - 1, range.last - range.first + 1), params);
}

LogPartitionDerivatives log_partition_derivatives(std::span<const double> h,
                                                  const ChainParams& params) {
  if (h.empty()) throw std::invalid_argument("range: empty field sequence");
  params.validate();
  LogChainState state(params.J, params.a, true);
  for (double v : h) state.advance(v);
  return {state.log_weight(params.b), state.dlog_weight(params.b), state.d2log_weight(params.b)};
}

FlipDensityReport flip_observables(std::span<const double> h, const ChainParams& params) {
  const auto d = log_partition_derivatives(h, params);
  const double n = static_cast<double>(h.size());
  // E[flips/N] = -1/2 d/dJ (log Z / N);  Var[flips/N] = 1/(4N) d^2/dJ^2 (log Z / N)
  return {-0.5 * d.d1 / n, d.d2 / (4.0 * n * n), h.size()};
}

std::vector<std::vector<ReplicaTotals>> run_replicas(const DisorderLaw& law,
                                                     std::span<const double> J_grid,
                                                     const ChainRunConfig& config) {
  if (config.chain_length == 0) throw std::invalid_argument("N: chain length must be >= 1");
  if (config.replicas == 0) throw std::invalid_argument("replicas: must be >= 1");
  if (J_grid.empty()) throw std::invalid_argument("J_grid: must be non-empty");
  for (double J : J_grid) ChainParams{J, config.a, config.b}.validate();

  std::vector<std::vector<ReplicaTotals>> out(config.replicas,
                                              std::vector<ReplicaTotals>(J_grid.size()));
  parallel_for(config.replicas, [&](std::size_t r) {
    FieldSampler sampler(law, config.seed, r, config.block);
    std::vector<LogChainState> states;
    states.reserve(J_grid.size());
    for (double J : J_grid) states.emplace_back(J, config.a, config.derivatives);

    std::vector<double> buffer(kFieldChunk), e2(kFieldChunk);
    std::size_t remaining = config.chain_length;
    while (remaining > 0) {
      const std::size_t n = std::min(remaining, kFieldChunk);
      std::span<double> chunk(buffer.data(), n);
      sampler.fill(chunk);
      for (std::size_t i = 0; i < n; ++i) e2[i] = std::exp(2.0 * chunk[i]);
      for (auto& state : states) {
        for (std::size_t i = 0; i < n; ++i) state.advance(chunk[i], e2[i]);
      }
      remaining -= n;
    }

    for (std::size_t j = 0; j < states.size(); ++j) {
      auto& t = out[r][j];
      t.log_z = states[j].log_weight(config.b);
      if (config.derivatives) {
        t.dlog_z = states[j].dlog_weight(config.b);
        t.d2log_z = states[j].d2log_weight(config.b);
      }
    }
  });
  return out;
}

FreeEnergyEstimate free_energy(const DisorderLaw& law, double J, std::size_t chain_length,
                               std::size_t replicas, std::uint64_t seed, int a, int b) {
  if (chain_length < kMinFreeEnergyChain)
    throw std::invalid_argument("N: chain length must be >= " +
                                std::to_string(kMinFreeEnergyChain));
  ChainRunConfig config{chain_length, replicas, seed, a, b, 1, false};
  const double grid[] = {J};
  const auto totals = run_replicas(law, grid, config);
  std::vector<double> per_site(replicas);
  for (std::size_t r = 0; r < replicas; ++r)
    per_site[r] = totals[r][0].log_z / static_cast<double>(chain_length);
  const auto est = mean_with_stderr(per_site);
  return {est.value, est.std_error, chain_length, replicas, seed};
}

FreeEnergyEstimate free_energy_of_fields(std::span<const double> h, const ChainParams& params) {
  const double lz = log_partition(h, params);
  return {lz / static_cast<double>(h.size()), 0.0, h.size(), 1, 0};
}

Estimate flip_density_limit(const DisorderLaw& law, double J, std::size_t chain_length,
                            std::size_t replicas, std::uint64_t seed) {
  if (chain_length < kMinFreeEnergyChain)
    throw std::invalid_argument("N: chain length must be >= " +
                                std::to_string(kMinFreeEnergyChain));
  ChainRunConfig config{chain_length, replicas, seed, +1, +1, 1, true};
  const double grid[] = {J};
  const auto totals = run_replicas(law, grid, config);
  std::vector<double> density(replicas);
  for (std::size_t r = 0; r < replicas; ++r)
    density[r] = -0.5 * totals[r][0].dlog_z / static_cast<double>(chain_length);
  return mean_with_stderr(density);
}

}  // namespace rfic
