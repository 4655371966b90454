#include "rfic/disorder.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/lambert_w.hpp>

#include "rfic/bessel.hpp"

#include "rfic/parallel.hpp"

namespace rfic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_variance(double variance) {
  if (!(variance > 0.0) || !std::isfinite(variance))
    throw std::invalid_argument("variance: must be finite and > 0");
}

}  // namespace

double pareto_unit_second_moment(double p) {
  if (!(p >= 2.0) || !std::isfinite(p)) throw std::invalid_argument("p: must be finite and >= 2");

  static std::mutex cache_mutex;
  static std::map<double, double> cache;
  {
    std::lock_guard lock(cache_mutex);
    if (auto it = cache.find(p); it != cache.end()) return it->second;
  }

  // E[Y^2] = int_0^inf 2 y S(y) dy. With t = log(1+y) and u = 1/(1+t) the
  // integrand becomes 2 (e^{(2-p)t} - e^{(1-p)t}) on u in (0, 1], bounded.
  auto integrand = [p](double u) {
    if (u <= 0.0) return p == 2.0 ? 2.0 : 0.0;
    const double t = 1.0 / u - 1.0;
    return 2.0 * (std::exp((2.0 - p) * t) - std::exp((1.0 - p) * t));
  };
  const double m2 =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, 1.0, 20, 1e-13);

  std::lock_guard lock(cache_mutex);
  cache.emplace(p, m2);
  return m2;
}

DisorderLaw::DisorderLaw(LawKind kind, double variance, double p)
    : kind_(kind), variance_(variance), theta_(std::sqrt(variance)), p_(p), scale_(0.0) {
  require_variance(variance);
  switch (kind_) {
    case LawKind::Gaussian:
    case LawKind::Rademacher:
      scale_ = theta_;
      break;
    case LawKind::Uniform:
      scale_ = std::sqrt(3.0) * theta_;
      break;
    case LawKind::ExponentialDiff:
      scale_ = theta_ / std::numbers::sqrt2;
      break;
    case LawKind::Pareto:
      scale_ = theta_ / std::sqrt(pareto_unit_second_moment(p));
      break;
  }
}

DisorderLaw DisorderLaw::gaussian(double variance) { return {LawKind::Gaussian, variance, kInf}; }
DisorderLaw DisorderLaw::rademacher(double variance) { return {LawKind::Rademacher, variance, kInf}; }
DisorderLaw DisorderLaw::uniform(double variance) { return {LawKind::Uniform, variance, kInf}; }
DisorderLaw DisorderLaw::exponential_diff(double variance) {
  return {LawKind::ExponentialDiff, variance, kInf};
}
DisorderLaw DisorderLaw::pareto(double p, double variance) {
  if (!(p >= 2.0) || !std::isfinite(p)) throw std::invalid_argument("p: must be finite and >= 2");
  return {LawKind::Pareto, variance, p};
}

double DisorderLaw::mgf(double t) const { return std::exp(log_mgf(t)); }

double DisorderLaw::log_mgf(double t) const {
  if (t == 0.0) return 0.0;
  const double at = std::abs(scale_ * t);
  switch (kind_) {
    case LawKind::Gaussian:
      return 0.5 * variance_ * t * t;
    case LawKind::Rademacher:  // log cosh
      return at + std::log1p(std::exp(-2.0 * at)) - kLog2;
    case LawKind::Uniform:  // log(sinh(at) / at)
      return at < 1e-4 ? at * at / 6.0
                       : at + std::log(-std::expm1(-2.0 * at)) - kLog2 - std::log(at);
    case LawKind::ExponentialDiff:
      return at < 1.0 ? -std::log1p(-at * at) : kInf;
    case LawKind::Pareto:
      return kInf;
  }
  return kInf;
}

// Inverse of the modulus survival function: with t = log(1+y) and s = 1+t,
// -log u = p t + 2 log(1+t) rearranges to (p/2) s e^{(p/2) s} = (p/2) e^{(p - log u)/2}.
double DisorderLaw::pareto_modulus(double u) const {
  const double e = -std::log(u);
  const double half_p = 0.5 * p_;
  const double log_z = std::log(half_p) + 0.5 * (e + p_);
  double w;
  if (log_z < 600.0) {
    w = boost::math::lambert_w0(std::exp(log_z));
  } else {
    w = log_z - std::log(log_z);
    for (int i = 0; i < 8; ++i) w -= (w + std::log(w) - log_z) / (1.0 + 1.0 / w);
  }
  const double t = std::max(0.0, w / half_p - 1.0);
  return std::expm1(t);
}

std::string DisorderLaw::name() const {
  switch (kind_) {
    case LawKind::Gaussian: return "gaussian";
    case LawKind::Rademacher: return "rademacher";
    case LawKind::Uniform: return "uniform";
    case LawKind::ExponentialDiff: return "expdiff";
    case LawKind::Pareto: return "pareto";
  }
  return "unknown";
}

nlohmann::json DisorderLaw::to_json() const {
  nlohmann::json j{{"kind", name()}, {"variance", variance_}};
  j["p"] = std::isfinite(p_) ? nlohmann::json(p_) : nlohmann::json(nullptr);
  return j;
}

DisorderLaw DisorderLaw::from_name(const std::string& kind, double variance, double p) {
  if (kind == "gaussian") return gaussian(variance);
  if (kind == "rademacher") return rademacher(variance);
  if (kind == "uniform") return uniform(variance);
  if (kind == "expdiff") return exponential_diff(variance);
  if (kind == "pareto") return pareto(p, variance);
  throw std::invalid_argument("kind: unknown law kind '" + kind + "'");
}

DisorderLaw DisorderLaw::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("law: expected a JSON object");
  if (!j.contains("kind") || !j["kind"].is_string())
    throw std::invalid_argument("kind: missing or not a string");
  double variance = 1.0;
  if (j.contains("variance")) {
    if (!j["variance"].is_number()) throw std::invalid_argument("variance: not a number");
    variance = j["variance"].get<double>();
  }
  double p = kInf;
  if (j.contains("p") && !j["p"].is_null()) {
    if (!j["p"].is_number()) throw std::invalid_argument("p: not a number");
    p = j["p"].get<double>();
  }
  const auto kind = j["kind"].get<std::string>();
  if (kind == "pareto" && !std::isfinite(p)) throw std::invalid_argument("p: required for pareto");
  return from_name(kind, variance, p);
}

FieldSampler::FieldSampler(const DisorderLaw& law, std::uint64_t seed, std::uint64_t stream,
                           std::size_t block)
    : law_(law), rng_(seed, stream), block_(block) {
  if (block_ == 0) throw std::invalid_argument("L: block length must be >= 1");
}

double FieldSampler::next() {
  double sum = 0.0;
  for (std::size_t i = 0; i < block_; ++i) sum += law_.draw(rng_, normal_);
  return sum;
}

void FieldSampler::fill(std::span<double> out) {
  if (block_ == 1) {
    for (double& v : out) v = law_.draw(rng_, normal_);
  } else {
    for (double& v : out) v = next();
  }
}

EmpiricalSample sample(const DisorderLaw& law, std::size_t n, std::uint64_t seed,
                       std::uint64_t stream) {
  return block_convolve(law, 1, n, seed, stream);
}

EmpiricalSample block_convolve(const DisorderLaw& law, std::size_t L, std::size_t n,
                               std::uint64_t seed, std::uint64_t stream) {
  if (L == 0) throw std::invalid_argument("L: must be >= 1");
  if (n == 0) throw std::invalid_argument("n: must be >= 1");
  FieldSampler sampler(law, seed, stream, L);
  EmpiricalSample out{std::vector<double>(n), law, L, seed};
  sampler.fill(out.values);
  std::sort(out.values.begin(), out.values.end());
  return out;
}

EmpiricalSample gaussian_quantile_grid(double variance, std::size_t n) {
  if (!(variance >= 0.0)) throw std::invalid_argument("variance: must be >= 0");
  if (n == 0) throw std::invalid_argument("n: must be >= 1");
  const double sigma = std::sqrt(variance);
  EmpiricalSample out{std::vector<double>(n), std::nullopt, 1, 0};
  for (std::size_t i = 0; i < n; ++i) {
    const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    // Phi^{-1}(u) = -sqrt(2) erfc^{-1}(2u)
    out.values[i] = -sigma * std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
  }
  return out;
}

namespace {

std::vector<double> bootstrap_down(const std::vector<double>& values, std::size_t n,
                                   std::uint64_t seed) {
  Rng rng(seed, 0xB0075);
  std::vector<double> out(n);
  const auto m = static_cast<double>(values.size());
  for (double& v : out) {
    auto idx = static_cast<std::size_t>(rng.uniform() * m);
    v = values[std::min(idx, values.size() - 1)];
  }
  std::sort(out.begin(), out.end());
  return out;
}

double sorted_pair_mean(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
  return sum / static_cast<double>(a.size());
}

}  // namespace

double w1_distance(const EmpiricalSample& a, const EmpiricalSample& b, W1Options opts) {
  if (a.values.empty() || b.values.empty()) throw std::invalid_argument("w1_distance: empty sample");
  if (a.values.size() == b.values.size()) return sorted_pair_mean(a.values, b.values);
  if (!opts.resample)
    throw std::invalid_argument("w1_distance: length mismatch (" + std::to_string(a.values.size()) +
                                " vs " + std::to_string(b.values.size()) +
                                ") and resampling disabled");
  if (a.values.size() < b.values.size())
    return sorted_pair_mean(a.values, bootstrap_down(b.values, a.values.size(), opts.seed));
  return sorted_pair_mean(bootstrap_down(a.values, b.values.size(), opts.seed), b.values);
}

Estimate w1_between_laws(const DisorderLaw& a, const DisorderLaw& b, std::size_t n,
                         std::uint64_t seed, std::size_t repeats) {
  if (repeats == 0) throw std::invalid_argument("repeats: must be >= 1");
  std::vector<double> w(repeats);
  parallel_for(repeats, [&](std::size_t r) {
    const auto sa = sample(a, n, seed, 2 * r);
    const auto sb = sample(b, n, seed, 2 * r + 1);
    w[r] = w1_distance(sa, sb);
  });
  return mean_with_stderr(w);
}

std::vector<W1Point> w1_clt_curve(const DisorderLaw& law, std::span<const std::size_t> L_grid,
                                  std::size_t n, std::uint64_t seed, std::size_t repeats) {
  if (!law.has_finite_moment(2.0)) throw std::invalid_argument("law: needs a finite second moment");
  if (repeats == 0) throw std::invalid_argument("repeats: must be >= 1");
  const std::size_t tasks = L_grid.size() * repeats;
  std::vector<double> w(tasks);
  parallel_for(tasks, [&](std::size_t task) {
    const std::size_t k = task / repeats, r = task % repeats;
    const std::size_t L = L_grid[k];
    const auto blocks = block_convolve(law, L, n, seed, k * repeats + r);
    const auto normal = gaussian_quantile_grid(static_cast<double>(L) * law.variance(), n);
    w[task] = w1_distance(blocks, normal);
  });
  std::vector<W1Point> curve;
  curve.reserve(L_grid.size());
  for (std::size_t k = 0; k < L_grid.size(); ++k) {
    const auto est = mean_with_stderr(std::span(w).subspan(k * repeats, repeats));
    curve.push_back({L_grid[k], est.value, est.std_error});
  }
  return curve;
}

}  // namespace rfic
