#include "banditvote/special.hpp"

#include "banditvote/types.hpp"

#include <cmath>
#include <limits>

namespace banditvote {
namespace {

// Rational coefficients after Cody (1969). Regime 1: |x| <= 0.46875.
constexpr double kA[5] = {3.16112374387056560e+00, 1.13864154151050156e+02,
                          3.77485237685302021e+02, 3.20937758913846947e+03,
                          1.85777706184603153e-01};
constexpr double kB[4] = {2.36012909523441209e+01, 2.44024637934444173e+02,
                          1.28261652607737228e+03, 2.84423683343917062e+03};

// Regime 2: 0.46875 < |x| <= 4.
constexpr double kC[9] = {5.64188496988670089e-01, 8.88314979438837594e+00,
                          6.61191906371416295e+01, 2.98635138197400131e+02,
                          8.81952221241769090e+02, 1.71204761263407058e+03,
                          2.05107837782607147e+03, 1.23033935479799725e+03,
                          2.15311535474403846e-08};
constexpr double kD[8] = {1.57449261107098347e+01, 1.17693950891312499e+02,
                          5.37181101862009858e+02, 1.62138957456669019e+03,
                          3.29079923573345963e+03, 4.36261909014324716e+03,
                          3.43936767414372164e+03, 1.23033935480374942e+03};

// Regime 3: |x| > 4, in terms of 1/x^2.
constexpr double kP[6] = {3.05326634961232344e-01, 3.60344899949804439e-01,
                          1.25781726111229246e-01, 1.60837851487422766e-02,
                          6.58749161529837803e-04, 1.63153871373020978e-02};
constexpr double kQ[5] = {2.56852019228982242e+00, 1.87295284992346047e+00,
                          5.27905102951428412e-01, 6.05183413124413191e-02,
                          2.33520497626869185e-03};

constexpr double kThresh = 0.46875;
constexpr double kXBig = 26.543;       // erfc underflows beyond this
constexpr double kXHuge = 6.71e+07;    // erfcx ~ 1/(sqrt(pi) x) beyond this
constexpr double kXMaxCx = 2.53e+307;  // erfcx overflow guard
constexpr double kXNeg = -26.628;      // exp(x^2) overflows below this

// Core evaluation for y = |x| in regime 1: erf(x)/x without the x factor's
// sign handling.
double erf_small(double x) {
  const double y = std::fabs(x);
  const double ysq = (y > 1.11e-16) ? y * y : 0.0;
  double xnum = kA[4] * ysq;
  double xden = ysq;
  for (int i = 0; i < 3; ++i) {
    xnum = (xnum + kA[i]) * ysq;
    xden = (xden + kB[i]) * ysq;
  }
  return x * (xnum + kA[3]) / (xden + kB[3]);
}

// erfcx(y) for y in regime 2 or 3, y > kThresh.
double erfcx_tail(double y) {
  if (y <= 4.0) {
    double xnum = kC[8] * y;
    double xden = y;
    for (int i = 0; i < 7; ++i) {
      xnum = (xnum + kC[i]) * y;
      xden = (xden + kD[i]) * y;
    }
    return (xnum + kC[7]) / (xden + kD[7]);
  }
  if (y >= kXHuge) return kInvSqrtPi / y;
  const double ysq = 1.0 / (y * y);
  double xnum = kP[5] * ysq;
  double xden = ysq;
  for (int i = 0; i < 4; ++i) {
    xnum = (xnum + kP[i]) * ysq;
    xden = (xden + kQ[i]) * ysq;
  }
  double r = ysq * (xnum + kP[4]) / (xden + kQ[4]);
  return (kInvSqrtPi - r) / y;
}

// exp(-y^2) with the split-argument trick that keeps the product
// exp(-y^2) * erfcx(y) fully accurate for large y.
double exp_neg_ysq(double y) {
  const double ysq = std::floor(y * 16.0) / 16.0;
  const double del = (y - ysq) * (y + ysq);
  return std::exp(-ysq * ysq) * std::exp(-del);
}

}  // namespace

double erf(double x) {
  require(std::isfinite(x), "erf of non-finite value");
  const double y = std::fabs(x);
  if (y <= kThresh) return erf_small(x);
  double r;
  if (y >= kXBig) {
    r = 0.0;
  } else {
    r = exp_neg_ysq(y) * erfcx_tail(y);
  }
  r = (0.5 - r) + 0.5;
  return (x < 0.0) ? -r : r;
}

double erfc(double x) {
  const double y = std::fabs(x);
  if (y <= kThresh) return 1.0 - erf_small(x);
  double r = (y >= kXBig) ? 0.0 : exp_neg_ysq(y) * erfcx_tail(y);
  return (x < 0.0) ? 2.0 - r : r;
}

double erfcx(double x) {
  const double y = std::fabs(x);
  if (y <= kThresh) return std::exp(y * y) * (1.0 - erf_small(x));
  if (x >= 0.0) {
    if (x >= kXMaxCx) return kInvSqrtPi / x;
    return erfcx_tail(x);
  }
  // erfcx(-y) = 2 exp(y^2) - erfcx(y)
  if (x < kXNeg) return std::numeric_limits<double>::infinity();
  const double ysq = std::floor(y * 16.0) / 16.0;
  const double del = (y - ysq) * (y + ysq);
  const double e = std::exp(ysq * ysq) * std::exp(del);
  return (e + e) - erfcx_tail(y);
}

double gaussian_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double gaussian_cdf(double z) { return 0.5 * erfc(-z * kInvSqrt2); }

double gaussian_pdf(double x, const GaussianParams& p) {
  require(p.variance > 0.0, "gaussian_pdf needs positive variance");
  const double sd = std::sqrt(p.variance);
  return gaussian_pdf((x - p.mean) / sd) / sd;
}

double gaussian_cdf(double x, const GaussianParams& p) {
  require(p.variance > 0.0, "gaussian_cdf needs positive variance");
  return gaussian_cdf((x - p.mean) / std::sqrt(p.variance));
}

double log_gaussian_cdf(double z) {
  if (z > 0.0) return std::log1p(-0.5 * erfc(z * kInvSqrt2));
  return std::log(0.5 * erfcx(-z * kInvSqrt2)) - 0.5 * z * z;
}

}  // namespace banditvote
