#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "../oracle/brute_force.hpp"
#include "rfic/chain.hpp"
#include "rfic/coarsegrain.hpp"

using namespace rfic;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<double> fields(const DisorderLaw& law, std::size_t n, std::uint64_t seed,
                           std::uint64_t stream = 0) {
  FieldSampler s(law, seed, stream);
  std::vector<double> h(n);
  s.fill(h);
  return h;
}

}  // namespace

TEST_CASE("block statistics by hand") {
  const std::vector<double> h{1, -2, 3};
  const auto st = block_stats(h);
  REQUIRE(st.H_L == oracle::window_range(h));
  REQUIRE(st.H_L == 3.0);
  REQUIRE(st.h_block == 2.0);
  REQUIRE(st.abs_sum == 6.0);
  REQUIRE(block_stats(std::vector<double>{-0.4}).H_L == 0.4);
  REQUIRE_THROWS(block_stats(std::vector<double>{}));
}

TEST_CASE("coarse fields") {
  const std::vector<double> h{1, 2, 3, 4};
  REQUIRE(coarse_fields(h, 2) == std::vector<double>{3, 7});
  REQUIRE(coarse_fields(h, 1) == h);
  REQUIRE_THROWS_WITH(coarse_fields(h, 3), Catch::Matchers::StartsWith("L"));
}

TEST_CASE("prefix-sum range equals the window maximum") {
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const std::size_t L = 1 + s % 40;
    // integer fields make both summation orders exact
    auto h = fields(DisorderLaw::rademacher(1.0), L, 3, s);
    for (std::size_t i = 0; i < L; i += 3) h[i] *= double(1 + (s + i) % 5);
    const auto st = block_stats(h);
    REQUIRE(st.H_L == oracle::window_range(h));
    REQUIRE(st.H_L >= std::abs(st.h_block));
    REQUIRE(st.abs_sum >= std::abs(st.h_block));
    for (double v : h) REQUIRE(st.H_L >= std::abs(v));

    const auto g = fields(DisorderLaw::gaussian(1.0), L, 4, s);
    REQUIRE_THAT(block_stats(g).H_L, WithinAbs(oracle::window_range(g), 1e-12));
  }
}

TEST_CASE("block bounds on trivial blocks") {
  const std::vector<double> zeros(6, 0.0);
  const auto r = verify_block_bounds(zeros, 2.0, 0.0, 1, 1);
  REQUIRE(r.size() == 3);
  REQUIRE(r[0].inequality_id == InequalityId::BlockLower);
  REQUIRE(r[0].lhs == 0.0);
  for (const auto& x : r) REQUIRE(x.pass);

  const std::vector<double> one{0.8};
  for (int a : {1, -1})
    for (int b : {1, -1}) {
      const auto rep = verify_block_bounds(one, 1.5, 0.5, a, b);
      REQUIRE(rep[0].pass);
      REQUIRE_THAT(rep[0].slack, WithinAbs(0.0, 1e-14));
    }
  REQUIRE_THROWS_WITH(verify_block_bounds(one, 1.0, -1.0, 1, 1), Catch::Matchers::StartsWith("M"));
}

TEST_CASE("block bounds hold on random gaussian blocks") {
  std::size_t checked = 0;
  for (std::uint64_t s = 0; s < 10'000; ++s) {
    const auto h = fields(DisorderLaw::gaussian(1.0), 8, 12, s);
    for (int a : {1, -1})
      for (int b : {1, -1})
        for (const auto& r : verify_block_bounds(h, 3.0, 1.0, a, b)) {
          if (!r.pass) FAIL("stream " << s << " " << to_string(r.inequality_id) << " slack " << r.slack);
          ++checked;
        }
  }
  REQUIRE(checked == 120'000);
}

TEST_CASE("coarse-grain identity") {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const std::size_t N = 1 + s % 4, L = 1 + (s / 4) % 3;
    const auto h = fields(DisorderLaw::exponential_diff(1.0), N * L, 6, s);
    const double J = 0.3 * double(s % 7);
    for (int a : {1, -1})
      for (int b : {1, -1}) {
        const double direct = log_partition(h, {J, a, b});
        const double blocks = coarse_grain_log_partition(h, L, J, a, b);
        REQUIRE(std::abs(blocks - direct) <= 1e-10 * std::abs(direct) + 1e-14);
      }
  }
}

TEST_CASE("tail expectation") {
  const auto law = DisorderLaw::gaussian(1.0);
  SECTION("M = 0 gives the mean range") {
    const auto t = tail_expectation(law, 16, 0.0, 2000, 1);
    REQUIRE(t.excess.value > 0.0);
    REQUIRE(t.prob.value == 1.0);
    REQUIRE(t.samples == 2000);
  }
  SECTION("exponential tail bound") {
    for (auto [L, M] : {std::pair<std::size_t, double>{16, 8}, {64, 16}, {32, 10}}) {
      const auto t = tail_expectation(law, L, M, 20'000, 2);
      REQUIRE(t.excess.value <= exp_tail_bound(1.0, L, M) + 3 * t.excess.std_error);
    }
  }
  REQUIRE_THROWS_WITH(tail_expectation(law, 4, 1.0, 999, 1), Catch::Matchers::StartsWith("n"));
}

TEST_CASE("pareto range moment grows like L^{p/2}") {
  const double p = 3.5;
  const auto law = DisorderLaw::pareto(p, 1.0);
  std::vector<double> Ls, m;
  for (std::size_t L : {16, 64, 256}) {
    Ls.push_back(double(L));
    m.push_back(block_moment(law, L, p, 20'000, 9).value);
  }
  const double slope = log_log_slope(Ls, m);
  REQUIRE(slope <= p / 2 + 0.2);
  REQUIRE(slope >= p / 2 - 0.4);
}

TEST_CASE("schedule exponents") {
  REQUIRE_THAT(schedule_for(Regime::Poly, 1.0, 3.0).eta, WithinRel(12.0 / 11.0, 1e-15));
  REQUIRE_THAT(schedule_for(Regime::Poly, 1.0, 2.0).eta, WithinRel(0.8, 1e-15));
  REQUIRE_THROWS_WITH(schedule_for(Regime::Poly, 1.0, 1.9), Catch::Matchers::StartsWith("p"));
  REQUIRE_THROWS_WITH(schedule_for(Regime::ExpMoments, 0.0, 2.0), Catch::Matchers::StartsWith("theta"));

  const auto e = schedule_for(Regime::ExpMoments, 1.0, 0.0);
  const double J = std::numbers::e;
  REQUIRE(e.L(J) == 3);
  REQUIRE_THAT(e.M(J), WithinRel(6.0 * std::pow(J, 2.0 / 3.0), 1e-15));
  REQUIRE_THROWS(e.L(1.0));
}

TEST_CASE("schedule closed forms") {
  const auto hi = schedule_for(Regime::Poly, 2.0, 4.0);
  REQUIRE(hi.L(10.0) == std::size_t(std::floor(std::pow(10.0, hi.eta))));
  REQUIRE_THAT(hi.M(10.0), WithinRel(std::pow(10.0, 2 - hi.eta), 1e-15));
  REQUIRE(hi.lower_L(10.0) == hi.L(10.0));

  const auto lo = schedule_for(Regime::Poly, 2.0, 2.5);
  REQUIRE(lo.L(10.0) == std::size_t(std::floor(std::pow(10.0, 2 * lo.eta / 1.5))));
  REQUIRE(lo.lower_L(10.0) == std::size_t(std::floor(std::pow(10.0, 1.6) / std::pow(std::log(10.0), 0.4))));
  REQUIRE_THAT(lo.lower_M(10.0), WithinRel(12.0 * std::pow(10.0, 0.8) * std::pow(std::log(10.0), 0.3), 1e-14));
}

TEST_CASE("exponent identities") {
  for (double p = 2.0; p <= 40.0; p += 0.125) {
    const double eta = eta_for_p(p);
    if (p >= 3.0) REQUIRE_THAT((2 - eta) * p - eta * p / 2, WithinAbs(eta, 1e-12));
    else REQUIRE_THAT((2 - eta) * p - (2 * eta / (p - 1)) * p / 2, WithinAbs(eta, 1e-12));
    REQUIRE((p - 1) * (2 - eta) >= eta - 1e-12);
    REQUIRE((eta > 1.0) == (p > (3 + std::sqrt(5.0)) / 2));
  }
}

TEST_CASE("regimes and moment guard") {
  REQUIRE(regime_for(DisorderLaw::rademacher(1)) == Regime::ExpMoments);
  REQUIRE(regime_for(DisorderLaw::pareto(3, 1)) == Regime::Poly);
  REQUIRE(subgaussian_radius(DisorderLaw::gaussian(2.0)) == 50.0);
  REQUIRE(subgaussian_radius(DisorderLaw::uniform(1.0)) == 50.0);
  REQUIRE(subgaussian_radius(DisorderLaw::pareto(3, 1)) == 0.0);
  // log(1/(1 - t^2/2)) = t^2 at t = 1.26238831586799792 (mpmath)
  REQUIRE_THAT(subgaussian_radius(DisorderLaw::exponential_diff(1.0)), WithinAbs(1.262388, 0.011));
  REQUIRE(threshold_guard(DisorderLaw::gaussian(1.0)) == 100.0);
}

TEST_CASE("inequality names") {
  REQUIRE(to_string(InequalityId::BlockUpperRevisited) == "block_upper_revisited");
  REQUIRE(to_string(InequalityId::ContinuumLower) == "continuum_lower");
}
