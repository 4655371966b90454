#pragma once

namespace rfic {

inline constexpr double kEulerGamma = 0.57721566490153286061;
inline constexpr double kLog2 = 0.69314718055994530942;

// Modified Bessel functions of the second kind for x > 0. Ascending series
// below x = 2, Temme's continued fraction (CF2) above.
double bessel_k0(double x);
double bessel_k1(double x);

/// x K_1(x) / K_0(x) at x = exp(log_x). Evaluated from log_x directly, so it
/// stays finite when x itself underflows (x -> 0 gives 1 / (-log(x/2) - gamma)).
double bessel_ratio_xk1_k0(double log_x);

}  // namespace rfic
