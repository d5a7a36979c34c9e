#pragma once

#include "banditvote/types.hpp"

namespace banditvote {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kInvSqrt2 = 0.70710678118654752440;
inline constexpr double kInvSqrtPi = 0.56418958354775628695;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// Error function family, rational Chebyshev approximations in three regimes
// (|x| <= 0.46875, |x| <= 4, |x| > 4). Absolute error below 1e-12 across the
// real line; erfcx stays accurate where erfc has long since underflowed.
double erf(double x);
double erfc(double x);
double erfcx(double x);  // exp(x^2) * erfc(x)

// Standard normal density and distribution.
double gaussian_pdf(double z);
double gaussian_cdf(double z);

double gaussian_pdf(double x, const GaussianParams& p);
double gaussian_cdf(double x, const GaussianParams& p);

// log(Phi(z)), stable in the far left tail via erfcx.
double log_gaussian_cdf(double z);

}  // namespace banditvote
