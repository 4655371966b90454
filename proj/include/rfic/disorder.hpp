#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rfic/rng.hpp"
#include "rfic/stats.hpp"

namespace rfic {

enum class LawKind { Gaussian, Rademacher, Uniform, ExponentialDiff, Pareto };

/// A centered law on the real line with variance theta^2 > 0.
///
/// Pareto is the symmetrised heavy-tailed law whose modulus Y has survival
/// function P[Y > y] = (1+y)^{-p} (1 + log(1+y))^{-2}; E|Y|^p is finite and
/// E|Y|^{p+eps} is infinite for every eps > 0. It is rescaled to the requested
/// variance. All other kinds have moments of every order.
class DisorderLaw {
 public:
  static DisorderLaw gaussian(double variance);
  static DisorderLaw rademacher(double variance);
  static DisorderLaw uniform(double variance);
  static DisorderLaw exponential_diff(double variance);
  static DisorderLaw pareto(double p, double variance);

  LawKind kind() const noexcept { return kind_; }
  double variance() const noexcept { return variance_; }
  double theta() const noexcept { return theta_; }
  /// Largest q with E|h|^q finite; +inf for light-tailed kinds.
  double moment_order() const noexcept { return p_; }
  bool has_finite_moment(double q) const noexcept { return q <= p_; }
  bool has_exponential_moments() const noexcept { return kind_ != LawKind::Pareto; }

  /// E[exp(t h)] in closed form; +inf where it diverges.
  double mgf(double t) const;
  /// log E[exp(t h)], finite wherever the mgf is (no overflow).
  double log_mgf(double t) const;

  /// One i.i.d. draw.
  template <class Normal>
  double draw(Rng& rng, Normal& normal) const;

  std::string name() const;
  nlohmann::json to_json() const;
  /// Throws std::invalid_argument naming the offending field.
  static DisorderLaw from_json(const nlohmann::json& j);
  static DisorderLaw from_name(const std::string& kind, double variance, double p);

  bool operator==(const DisorderLaw&) const = default;

 private:
  DisorderLaw(LawKind kind, double variance, double p);

  double pareto_modulus(double u) const;

  LawKind kind_;
  double variance_;
  double theta_;
  double p_;
  double scale_;  // multiplier applied to the unit-shape draw
};

/// Second moment of the unit Pareto modulus Y (by quadrature).
double pareto_unit_second_moment(double p);

/// Draw source for a disorder law: each value is the sum of `block` i.i.d.
/// draws (block = 1 gives plain samples, block = L gives the law of h^L).
class FieldSampler {
 public:
  FieldSampler(const DisorderLaw& law, std::uint64_t seed, std::uint64_t stream,
               std::size_t block = 1);

  double next();
  void fill(std::span<double> out);
  std::size_t block() const noexcept { return block_; }

 private:
  DisorderLaw law_;
  Rng rng_;
  std::normal_distribution<double> normal_;
  std::size_t block_;
};

/// Sorted draws together with where they came from.
struct EmpiricalSample {
  std::vector<double> values;          // ascending
  std::optional<DisorderLaw> law;      // empty for deterministic grids
  std::size_t block = 1;
  std::uint64_t seed = 0;
};

EmpiricalSample sample(const DisorderLaw& law, std::size_t n, std::uint64_t seed,
                       std::uint64_t stream = 0);

/// n draws of h_1 + ... + h_L.
EmpiricalSample block_convolve(const DisorderLaw& law, std::size_t L, std::size_t n,
                               std::uint64_t seed, std::uint64_t stream = 0);

/// The deterministic n-point quantile grid sigma * Phi^{-1}((i - 1/2) / n) of
/// N(0, variance); the natural discretisation of a Gaussian for 1-D coupling.
EmpiricalSample gaussian_quantile_grid(double variance, std::size_t n);

struct W1Options {
  bool resample = false;       // bootstrap the longer sample down to the shorter length
  std::uint64_t seed = 0;
};

/// Empirical W1 by sorted-order pairing, the optimal coupling in one dimension.
double w1_distance(const EmpiricalSample& a, const EmpiricalSample& b, W1Options opts = {});

/// W1 between two laws, averaged over independent repeats.
Estimate w1_between_laws(const DisorderLaw& a, const DisorderLaw& b, std::size_t n,
                         std::uint64_t seed, std::size_t repeats = 8);

struct W1Point {
  std::size_t L = 0;
  double w1 = 0.0;
  double std_error = 0.0;
};

/// W1(mu^{*L}, N(0, L theta^2)) for each L; raw curve, no assertions.
std::vector<W1Point> w1_clt_curve(const DisorderLaw& law, std::span<const std::size_t> L_grid,
                                  std::size_t n, std::uint64_t seed, std::size_t repeats = 8);

// ---------------------------------------------------------------------------

template <class Normal>
double DisorderLaw::draw(Rng& rng, Normal& normal) const {
  switch (kind_) {
    case LawKind::Gaussian:
      return scale_ * normal(rng);
    case LawKind::Rademacher:
      return rng.coin() ? scale_ : -scale_;
    case LawKind::Uniform:
      return scale_ * (2.0 * rng.uniform() - 1.0);
    case LawKind::ExponentialDiff:
      return scale_ * (std::log(rng.uniform_open()) - std::log(rng.uniform_open()));
    case LawKind::Pareto: {
      const double y = pareto_modulus(rng.uniform_open());
      return rng.coin() ? scale_ * y : -scale_ * y;
    }
  }
  return 0.0;
}

}  // namespace rfic
