#include "rfic/bessel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace rfic {

namespace {

constexpr double kSeriesLimit = 2.0;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Ascending-series pieces in terms of log x. With t = x^2/4:
//   K0 = -(log(x/2) + gamma) sum t^k/(k!)^2 + sum H_k t^k/(k!)^2
//   x K1 = 1 + (x^2/2) log(x/2) sum t^k/(k!(k+1)!)
//          - (x^2/4) sum (psi(k+1) + psi(k+2)) t^k/(k!(k+1)!)
struct SeriesTerms {
  double k0;
  double xk1;
};

SeriesTerms small_x_series(double log_x) {
  const double log_half_x = log_x - kLog2;
  const double x2 = std::exp(2.0 * log_x);
  const double t = 0.25 * x2;

  double a = 1.0;  // t^k / (k!)^2
  double b = 1.0;  // t^k / (k! (k+1)!)
  double harmonic = 0.0;  // H_k
  double i0 = 1.0, s0 = 0.0;
  double p = 1.0, q = (-kEulerGamma) + (1.0 - kEulerGamma);  // psi(1) + psi(2)
  for (int k = 1; k < 200; ++k) {
    const double kk = static_cast<double>(k);
    a *= t / (kk * kk);
    b *= t / (kk * (kk + 1.0));
    harmonic += 1.0 / kk;
    const double psi_sum = 2.0 * (harmonic - kEulerGamma) + 1.0 / (kk + 1.0);
    i0 += a;
    s0 += harmonic * a;
    p += b;
    q += psi_sum * b;
    if (a < kEps * 1e-3 * i0 && b < kEps * 1e-3 * p) break;
  }
  const double k0 = -(log_half_x + kEulerGamma) * i0 + s0;
  const double xk1 = x2 == 0.0 ? 1.0 : 1.0 + 0.5 * x2 * log_half_x * p - 0.25 * x2 * q;
  return {k0, xk1};
}

// Temme's CF2 (Steed's algorithm) for order 0. Returns K0 and the ratio
// x K1 / K0 = x + 1/2 - h.
struct LargeX {
  double k0;
  double ratio;
};

LargeX large_x_cf2(double x) {
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d, delh = d;
  double q1 = 0.0, q2 = 1.0;
  const double a1 = 0.25;
  double q = a1, c = a1, a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 1; i < 100000; ++i) {
    a -= 2.0 * i;
    c = -a * c / (i + 1.0);
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < kEps) break;
  }
  h *= a1;
  const double k0 = std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x) / s;
  return {k0, x + 0.5 - h};
}

void require_positive(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw std::domain_error("bessel: x must be finite and > 0");
}

}  // namespace

double bessel_k0(double x) {
  require_positive(x);
  if (x < kSeriesLimit) return small_x_series(std::log(x)).k0;
  return large_x_cf2(x).k0;
}

double bessel_k1(double x) {
  require_positive(x);
  if (x < kSeriesLimit) return small_x_series(std::log(x)).xk1 / x;
  const auto r = large_x_cf2(x);
  return r.k0 * r.ratio / x;
}

double bessel_ratio_xk1_k0(double log_x) {
  if (std::isnan(log_x) || log_x == std::numeric_limits<double>::infinity())
    throw std::domain_error("bessel_ratio_xk1_k0: log_x must be < +inf");
  if (log_x < std::log(kSeriesLimit)) {
    const auto s = small_x_series(log_x);
    return s.xk1 / s.k0;
  }
  return large_x_cf2(std::exp(log_x)).ratio;
}

}  // namespace rfic
