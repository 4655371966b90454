#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rfic {

/// A Monte Carlo point estimate with its standard error.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

inline Estimate mean_with_stderr(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean_with_stderr: empty input");
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  if (xs.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

inline double combined_stderr(double a, double b) { return std::hypot(a, b); }

inline Estimate operator-(const Estimate& a, const Estimate& b) {
  return {a.value - b.value, combined_stderr(a.std_error, b.std_error)};
}

inline Estimate operator+(const Estimate& a, const Estimate& b) {
  return {a.value + b.value, combined_stderr(a.std_error, b.std_error)};
}

inline Estimate operator*(double c, const Estimate& a) { return {c * a.value, std::abs(c) * a.std_error}; }

/// Least-squares slope of log(y) against log(x).
inline double log_log_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("log_log_slope: need two or more aligned points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw std::invalid_argument("log_log_slope: non-positive value");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

enum class InequalityId {
  BlockLower,            // Z_L >= exp(-2J 1{a!=b} + b h^L)
  BlockUpper,            // L(4(H_L-M)_+ + e^{2(M-J)}) form
  BlockUpperRevisited,   // (L log 2 + 2 sum|h|) 1{H_L>M} form
  ContinuumLower,        // one-block continuum lower bound
  ContinuumUpper,        // one-block continuum upper bound
};

std::string_view to_string(InequalityId id);

/// One side-by-side comparison of an inequality lhs <= rhs, evaluated on log
/// scale. pass <=> slack >= -1e-10 |rhs|.
struct BlockBoundReport {
  InequalityId inequality_id{};
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool pass = false;
};

inline constexpr double kBoundRelTolerance = 1e-10;

inline BlockBoundReport make_bound_report(InequalityId id, double lhs, double rhs) {
  const double slack = rhs - lhs;
  return {id, lhs, rhs, slack, slack >= -kBoundRelTolerance * std::abs(rhs)};
}

}  // namespace rfic
