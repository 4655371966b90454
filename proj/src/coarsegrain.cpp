#include "rfic/coarsegrain.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "rfic/bessel.hpp"
#include "rfic/chain.hpp"
#include "rfic/parallel.hpp"

namespace rfic {

std::string_view to_string(InequalityId id) {
  switch (id) {
    case InequalityId::BlockLower:
      return "block_lower";
    case InequalityId::BlockUpper:
      return "block_upper";
    case InequalityId::BlockUpperRevisited:
      return "block_upper_revisited";
    case InequalityId::ContinuumLower:
      return "continuum_lower";
    case InequalityId::ContinuumUpper:
      return "continuum_upper";
  }
  return "unknown";
}

BlockStats block_stats(std::span<const double> h) {
  if (h.empty()) throw std::invalid_argument("h: empty block");
  BlockStats s;
  s.L = h.size();
  double prefix = 0.0, lo = 0.0, hi = 0.0;
  for (double v : h) {
    prefix += v;
    lo = std::min(lo, prefix);
    hi = std::max(hi, prefix);
    s.abs_sum += std::abs(v);
  }
  s.h_block = prefix;
  s.H_L = hi - lo;
  return s;
}

std::vector<double> coarse_fields(std::span<const double> h, std::size_t L) {
  if (L == 0) throw std::invalid_argument("L: must be >= 1");
  if (h.size() % L != 0)
    throw std::invalid_argument("L: length " + std::to_string(h.size()) +
                                " is not a multiple of " + std::to_string(L));
  std::vector<double> out(h.size() / L, 0.0);
  for (std::size_t i = 0; i < h.size(); ++i) out[i / L] += h[i];
  return out;
}

std::vector<BlockBoundReport> verify_block_bounds(std::span<const double> h, double J, double M,
                                                  int a, int b) {
  if (!(M >= 0.0)) throw std::invalid_argument("M: must be >= 0");
  if (!(J >= 0.0)) throw std::invalid_argument("J: must be >= 0");
  const auto st = block_stats(h);
  const double log_z = log_partition(h, ChainParams{J, a, b});
  const double L = static_cast<double>(st.L);
  const double flip = a != b ? 1.0 : 0.0;
  const double field = b * st.h_block;
  const double flip_cost = std::exp(2.0 * (M - J));
  const double crossing = -2.0 * (J - M - 0.5 * std::log(L)) * flip;

  const double lower = -2.0 * J * flip + field;
  const double upper = crossing + field + L * (4.0 * std::max(0.0, st.H_L - M) + flip_cost);
  const double revisited = crossing + field +
                           (st.H_L > M ? L * kLog2 + 2.0 * st.abs_sum : 0.0) +
                           L * flip_cost;
  return {make_bound_report(InequalityId::BlockLower, lower, log_z),
          make_bound_report(InequalityId::BlockUpper, log_z, upper),
          make_bound_report(InequalityId::BlockUpperRevisited, log_z, revisited)};
}

double coarse_grain_log_partition(std::span<const double> h, std::size_t L, double J, int a,
                                  int b) {
  if (L == 0 || h.empty() || h.size() % L != 0)
    throw std::invalid_argument("L: length must be a positive multiple of L");
  const std::size_t N = h.size() / L;
  if (N > 24) throw std::invalid_argument("N: too many blocks to enumerate");

  // log Z of block k for each (entry spin, exit spin)
  std::vector<std::array<std::array<double, 2>, 2>> block(N);
  for (std::size_t k = 0; k < N; ++k)
    for (int s : {+1, -1})
      for (int t : {+1, -1})
        block[k][spin_index(s)][spin_index(t)] =
            log_partition(h.subspan(k * L, L), ChainParams{J, s, t});

  const std::size_t free_spins = N - 1;
  std::vector<double> terms;
  terms.reserve(std::size_t{1} << free_spins);
  for (std::size_t mask = 0; mask < (std::size_t{1} << free_spins); ++mask) {
    int prev = a;
    double acc = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
      const int next = k + 1 == N ? b : (((mask >> k) & 1u) ? -1 : +1);
      acc += block[k][spin_index(prev)][spin_index(next)];
      prev = next;
    }
    terms.push_back(acc);
  }
  const double top = *std::max_element(terms.begin(), terms.end());
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - top);
  return top + std::log(sum);
}

TailExpectation tail_expectation(const DisorderLaw& law, std::size_t L, double M, std::size_t n,
                                 std::uint64_t seed) {
  if (L == 0) throw std::invalid_argument("L: must be >= 1");
  if (n < kMinTailSamples)
    throw std::invalid_argument("n: need at least " + std::to_string(kMinTailSamples) + " draws");
  if (!(M >= 0.0)) throw std::invalid_argument("M: must be >= 0");

  std::vector<double> excess(n), prob(n), revisited(n);
  parallel_for(n, [&](std::size_t i) {
    FieldSampler sampler(law, seed, i);
    std::vector<double> h(L);
    sampler.fill(h);
    const auto st = block_stats(h);
    const bool above = st.H_L > M;
    excess[i] = std::max(0.0, st.H_L - M);
    prob[i] = above ? 1.0 : 0.0;
    revisited[i] = above ? kLog2 + 2.0 * st.abs_sum / static_cast<double>(L) : 0.0;
  });
  return {mean_with_stderr(excess), mean_with_stderr(prob), mean_with_stderr(revisited), n};
}

double exp_tail_bound(double variance, std::size_t L, double M) {
  if (!(M > 0.0)) throw std::invalid_argument("M: must be > 0");
  const double l = static_cast<double>(L);
  return 4.0 * variance * l * l * l / M * std::exp(-M * M / (4.0 * variance * l));
}

Estimate block_moment(const DisorderLaw& law, std::size_t L, double q, std::size_t n,
                      std::uint64_t seed) {
  if (L == 0) throw std::invalid_argument("L: must be >= 1");
  if (n == 0) throw std::invalid_argument("n: must be >= 1");
  std::vector<double> values(n);
  parallel_for(n, [&](std::size_t i) {
    FieldSampler sampler(law, seed, i);
    std::vector<double> h(L);
    sampler.fill(h);
    values[i] = std::pow(block_stats(h).H_L, q);
  });
  return mean_with_stderr(values);
}

double subgaussian_radius(const DisorderLaw& law, double cap) {
  if (!law.has_exponential_moments()) return 0.0;
  const double v = law.variance();
  constexpr int kSteps = 5000;
  double last_ok = 0.0;
  for (int i = 1; i <= kSteps; ++i) {
    const double t = cap * i / kSteps;
    const double bound = v * t * t;
    // mgf is even for every implemented law
    const double lhs = law.log_mgf(t);
    if (!(lhs <= bound)) return last_ok;
    last_ok = t;
  }
  return cap;
}

double threshold_guard(const DisorderLaw& law) {
  return 2.0 * law.variance() * subgaussian_radius(law);
}

namespace {

void require_large_J(double J) {
  if (!(J > 1.0) || !std::isfinite(J)) throw std::invalid_argument("J: schedule needs J > 1");
}

std::size_t floor_count(double v) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(v)));
}

}  // namespace

double eta_for_p(double p) {
  if (!(p >= 2.0)) throw std::invalid_argument("p: must be >= 2");
  if (std::isinf(p)) return 4.0 / 3.0;
  if (p >= 3.0) return 4.0 * p / (3.0 * p + 2.0);
  return 2.0 * p * (p - 1.0) / (p * p + p - 1.0);
}

Schedule schedule_for(Regime regime, double theta, double p) {
  if (!(theta > 0.0) || !std::isfinite(theta)) throw std::invalid_argument("theta: must be > 0");
  Schedule s;
  s.regime = regime;
  s.theta = theta;
  if (regime == Regime::ExpMoments) {
    s.p = std::numeric_limits<double>::infinity();
    s.eta = 4.0 / 3.0;
    return s;
  }
  if (std::isnan(p) || p < 2.0) throw std::invalid_argument("p: must be >= 2");
  s.p = p;
  s.eta = eta_for_p(p);
  return s;
}

Regime regime_for(const DisorderLaw& law) {
  return law.has_exponential_moments() ? Regime::ExpMoments : Regime::Poly;
}

Schedule schedule_for(const DisorderLaw& law) {
  return schedule_for(regime_for(law), law.theta(), law.moment_order());
}

std::size_t Schedule::L(double J) const {
  require_large_J(J);
  if (regime == Regime::ExpMoments)
    return floor_count(std::pow(J, 4.0 / 3.0) / std::cbrt(std::log(J)));
  if (p >= 3.0) return floor_count(std::pow(J, eta));
  return floor_count(std::pow(J, 2.0 * eta / (p - 1.0)));
}

double Schedule::M(double J) const {
  require_large_J(J);
  if (regime == Regime::ExpMoments)
    return 6.0 * theta * std::pow(J, 2.0 / 3.0) * std::cbrt(std::log(J));
  return std::pow(J, 2.0 - eta);
}

std::size_t Schedule::lower_L(double J) const {
  if (regime == Regime::Poly && p < 3.0) {
    require_large_J(J);
    return floor_count(std::pow(J, 4.0 / p) / std::pow(std::log(J), 1.0 / p));
  }
  return L(J);
}

double Schedule::lower_M(double J) const {
  if (regime == Regime::Poly && p < 3.0) {
    require_large_J(J);
    return 6.0 * theta * std::pow(J, 2.0 / p) * std::pow(std::log(J), (p - 1.0) / (2.0 * p));
  }
  return M(J);
}

}  // namespace rfic
