#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <vector>

#include "../oracle/brute_force.hpp"
#include "rfic/chain.hpp"

using namespace rfic;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<double> fields(const DisorderLaw& law, std::size_t n, std::uint64_t seed) {
  FieldSampler s(law, seed, 0);
  std::vector<double> h(n);
  s.fill(h);
  return h;
}

DisorderLaw law_by_index(std::size_t i) {
  switch (i % 5) {
    case 0: return DisorderLaw::gaussian(1.0);
    case 1: return DisorderLaw::rademacher(2.0);
    case 2: return DisorderLaw::uniform(0.5);
    case 3: return DisorderLaw::exponential_diff(1.5);
    default: return DisorderLaw::pareto(2.5, 1.0);
  }
}

}  // namespace

TEST_CASE("step matrix") {
  const auto m0 = step_matrix(0.0, {0.0});
  for (auto& row : m0)
    for (double v : row) REQUIRE(v == 1.0);
  const auto m = step_matrix(0.0, {1.3});
  REQUIRE(m[0][0] == 1.0);
  REQUIRE(m[1][1] == 1.0);
  REQUIRE_THAT(m[0][1], WithinRel(std::exp(-2.6), 1e-15));
  REQUIRE_THAT(m[1][0], WithinRel(std::exp(-2.6), 1e-15));

  const double h = 0.7, J = 0.4;
  const auto mh = step_matrix(h, {J});
  for (int a : {1, -1})
    for (int b : {1, -1}) {
      const std::vector<double> one{h};
      REQUIRE_THAT(std::exp(log_partition(one, {J, a, b})), WithinRel(mh[spin_index(a)][spin_index(b)], 1e-14));
      REQUIRE_THAT(mh[spin_index(a)][spin_index(b)], WithinRel(std::exp(-2 * J * (a != b) + b * h), 1e-15));
    }
}

TEST_CASE("two free-field sites with no coupling") {
  const std::vector<double> h{0.0, 0.0};
  REQUIRE_THAT(log_partition(h, {0.0, 1, 1}, {1, 2}), WithinAbs(std::log(2.0), 1e-15));
}

TEST_CASE("log partition matches enumeration for short chains") {
  for (std::size_t trial = 0; trial < 100; ++trial) {
    const std::size_t N = 1 + trial % 12;
    const double J = 0.05 * double(trial % 61);
    const auto h = fields(law_by_index(trial), N, 1000 + trial);
    for (int a : {1, -1})
      for (int b : {1, -1}) {
        const double expect = oracle::log_partition(h, J, a, b);
        const double got = log_partition(h, {J, a, b});
        INFO("trial " << trial << " N=" << N << " J=" << J);
        REQUIRE(std::abs(got - expect) <= 1e-9 * std::abs(expect) + 1e-12);
      }
  }
}

TEST_CASE("sub-range partition function") {
  const auto h = fields(DisorderLaw::gaussian(1.0), 10, 5);
  const std::vector<double> mid(h.begin() + 2, h.begin() + 7);
  REQUIRE(log_partition(h, {1.0, -1, 1}, {3, 7}) == log_partition(mid, {1.0, -1, 1}));
  REQUIRE_THROWS_WITH(log_partition(h, {1.0}, {4, 3}), Catch::Matchers::StartsWith("range"));
  REQUIRE_THROWS_WITH(log_partition(h, {1.0}, {0, 3}), Catch::Matchers::StartsWith("range"));
  REQUIRE_THROWS_WITH(log_partition(h, {1.0}, {1, 11}), Catch::Matchers::StartsWith("range"));
  REQUIRE_THROWS(log_partition(std::vector<double>{}, {1.0}));
  REQUIRE_THROWS_WITH(log_partition(h, {1.0, 0, 1}), Catch::Matchers::StartsWith("a"));
}

TEST_CASE("deterministic field gives the top eigenvalue") {
  const std::vector<double> h(200'000, 0.0);
  for (double J : {0.0, 1.0, 3.0}) {
    const auto fe = free_energy_of_fields(h, {J});
    REQUIRE_THAT(fe.value, WithinAbs(std::log1p(std::exp(-2 * J)), 1e-5));
  }
  REQUIRE_THAT(free_energy_of_fields(h, {1.0}).value, WithinAbs(0.12692801104297263, 1e-5));
}

TEST_CASE("state stays normalised") {
  LogChainState st(2.0, -1, true);
  const auto h = fields(DisorderLaw::pareto(2.5, 4.0), 5000, 3);
  for (double v : h) {
    st.advance(v);
    const auto lv = st.logvec();
    REQUIRE(std::max(lv[0], lv[1]) == 0.0);
    REQUIRE(std::isfinite(st.dlog_weight(1)));
    REQUIRE(std::isfinite(st.d2log_weight(-1)));
  }
  REQUIRE(st.steps() == 5000);
}

TEST_CASE("flip observables on one site") {
  const std::vector<double> h{0.37};
  for (double J : {0.0, 1.0, 4.0}) {
    REQUIRE_THAT(flip_observables(h, {J, 1, 1}).mean_density, WithinAbs(0.0, 1e-15));
    REQUIRE_THAT(flip_observables(h, {J, 1, -1}).mean_density, WithinAbs(1.0, 1e-15));
    REQUIRE_THAT(flip_observables(h, {J, 1, -1}).variance_density, WithinAbs(0.0, 1e-15));
  }
}

TEST_CASE("flip observables match finite differences and enumeration") {
  const double dJ = 1e-5;
  for (std::size_t trial = 0; trial < 100; ++trial) {
    const auto h = fields(law_by_index(trial), 10, 7000 + trial);
    const double J = 0.1 + 0.05 * double(trial % 40);
    const int a = trial % 2 ? 1 : -1, b = trial % 3 ? 1 : -1;
    const double n = 10.0;
    const auto rep = flip_observables(h, {J, a, b});
    const double fp = log_partition(h, {J + dJ, a, b}) / n;
    const double f0 = log_partition(h, {J, a, b}) / n;
    const double fm = log_partition(h, {J - dJ, a, b}) / n;
    const double fd_mean = -0.5 * (fp - fm) / (2 * dJ);
    const double fd_var = (fp - 2 * f0 + fm) / (dJ * dJ) / (4 * n);
    INFO("trial " << trial);
    REQUIRE_THAT(rep.mean_density, WithinRel(fd_mean, 1e-5));
    REQUIRE(std::abs(rep.variance_density - fd_var) <= 1e-5 * std::abs(fd_var) + 1e-6);

    const auto exact = oracle::flip_moments(h, J, a, b);
    REQUIRE_THAT(rep.mean_density, WithinRel(exact.mean, 1e-10));
    REQUIRE(std::abs(rep.variance_density - exact.variance) <= 1e-10 * exact.variance + 1e-14);
  }
}

TEST_CASE("log Z is non-increasing and convex in J") {
  const auto h = fields(DisorderLaw::gaussian(1.0), 20'000, 9);
  std::vector<double> f;
  for (int k = 0; k <= 40; ++k) f.push_back(free_energy_of_fields(h, {0.2 * k}).value);
  for (std::size_t k = 1; k < f.size(); ++k) REQUIRE(f[k] <= f[k - 1] + 1e-12);
  for (std::size_t k = 1; k + 1 < f.size(); ++k) REQUIRE(f[k + 1] - 2 * f[k] + f[k - 1] >= -1e-9);
}

TEST_CASE("zero-coupling free energy equals E log 2cosh h") {
  // quadrature: E[log(2 cosh Z)], Z ~ N(0,1)
  const double exact = 1.06771438805138328351749693964;
  const auto est = free_energy(DisorderLaw::gaussian(1.0), 0.0, 100'000, 32, 4);
  REQUIRE(std::abs(est.value - exact) <= 3.0 * est.std_error + 1e-9);

  // brute force with a free right end over 10^4 short chains
  std::vector<double> per_site;
  for (std::size_t r = 0; r < 10'000; ++r) {
    FieldSampler s(DisorderLaw::gaussian(1.0), 99, r);
    std::vector<double> h(12);
    s.fill(h);
    per_site.push_back(oracle::log_partition(h, 0.0, 1, 0) / 12.0);
  }
  const auto brute = mean_with_stderr(per_site);
  REQUIRE(std::abs(est.value - brute.value) <= 3.0 * combined_stderr(est.std_error, brute.std_error));
}

TEST_CASE("free energy is boundary insensitive") {
  const std::size_t N = 100'000;
  const double J = 3.0;
  const auto law = DisorderLaw::rademacher(1.0);
  const auto pp = free_energy(law, J, N, 8, 21, 1, 1);
  for (auto [a, b] : {std::pair{1, -1}, std::pair{-1, 1}, std::pair{-1, -1}}) {
    const auto other = free_energy(law, J, N, 8, 21, a, b);
    REQUIRE(std::abs(other.value - pp.value) <= 8 * J / double(N) + 3 * combined_stderr(pp.std_error, other.std_error));
  }
}

TEST_CASE("free energy estimate fields") {
  const auto est = free_energy(DisorderLaw::uniform(1.0), 2.0, 5000, 6, 77);
  REQUIRE(est.chain_length == 5000);
  REQUIRE(est.replicas == 6);
  REQUIRE(est.seed == 77);
  REQUIRE(est.std_error >= 0.0);
  REQUIRE(est.value >= -3 * est.std_error);
  REQUIRE_THROWS_WITH(free_energy(DisorderLaw::uniform(1.0), 2.0, 999, 6, 77), Catch::Matchers::StartsWith("N"));
}

TEST_CASE("flip density limit for a vanishing field") {
  const std::vector<double> h(100'000, 0.0);
  for (double J : {0.5, 2.0}) {
    const double x = std::exp(-2 * J);
    REQUIRE_THAT(flip_observables(h, {J}).mean_density, WithinAbs(x / (1 + x), 1e-4));
  }
}

TEST_CASE("forced boundary flip floor") {
  const auto h = fields(DisorderLaw::gaussian(1.0), 50, 2);
  const auto rep = flip_observables(h, {30.0, 1, -1});
  REQUIRE(rep.mean_density >= 1.0 / 50 - 1e-12);
  REQUIRE(rep.mean_density <= 1.0);
}

TEST_CASE("replica results do not depend on the worker count") {
  const double grid[] = {1.0, 2.5};
  ChainRunConfig cfg{20'000, 6, 5, 1, 1, 1, true};
  ::setenv("RFIC_THREADS", "1", 1);
  const auto one = run_replicas(DisorderLaw::exponential_diff(1.0), grid, cfg);
  ::setenv("RFIC_THREADS", "4", 1);
  const auto four = run_replicas(DisorderLaw::exponential_diff(1.0), grid, cfg);
  ::unsetenv("RFIC_THREADS");
  for (std::size_t r = 0; r < 6; ++r)
    for (std::size_t j = 0; j < 2; ++j) {
      REQUIRE(one[r][j].log_z == four[r][j].log_z);
      REQUIRE(one[r][j].dlog_z == four[r][j].dlog_z);
    }
}

TEST_CASE("derivative and plain paths agree bit for bit") {
  const double grid[] = {2.0};
  ChainRunConfig plain{5000, 3, 8, 1, -1, 1, false};
  ChainRunConfig deriv = plain;
  deriv.derivatives = true;
  const auto a = run_replicas(DisorderLaw::gaussian(1.0), grid, plain);
  const auto b = run_replicas(DisorderLaw::gaussian(1.0), grid, deriv);
  for (std::size_t r = 0; r < 3; ++r) REQUIRE(a[r][0].log_z == b[r][0].log_z);
}
