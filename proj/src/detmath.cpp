#include "mfp/detmath.hpp"

#include <cmath>
#include <limits>

namespace mfp::detmath {

namespace {

// ln(2) split so that k * kLn2Hi is exact for |k| < 2^11.
constexpr double kLn2Hi = 6.93147180369123816490e-01;
constexpr double kLn2Lo = 1.90821492927058770002e-10;
constexpr double kInvLn2 = 1.44269504088896338700e+00;
constexpr double kSqrtHalf = 0.70710678118654752440;

}  // namespace

double exp(double x) {
  if (std::isnan(x)) return x;
  if (x > 709.782712893384) return std::numeric_limits<double>::infinity();
  if (x < -745.2) return 0.0;

  const double kf = std::nearbyint(x * kInvLn2);
  const int k = static_cast<int>(kf);
  const double r = (x - kf * kLn2Hi) - kf * kLn2Lo;  // |r| <= ~0.347

  // Taylor series of e^r; 1/18! * 0.347^18 is far below half an ulp.
  double sum = 1.0;
  for (int n = 18; n >= 1; --n) sum = 1.0 + sum * r / n;

  // Scale in two steps so neither intermediate overflows or underflows early.
  const int k1 = k / 2;
  return std::ldexp(std::ldexp(sum, k1), k - k1);
}

double log(double x) {
  if (std::isnan(x) || x < 0.0) return std::numeric_limits<double>::quiet_NaN();
  if (x == 0.0) return -std::numeric_limits<double>::infinity();
  if (std::isinf(x)) return x;

  int k = 0;
  double m = std::frexp(x, &k);  // x = m * 2^k, m in [0.5, 1)
  if (m < kSqrtHalf) {
    m *= 2.0;
    --k;
  }
  // m in [sqrt(1/2), sqrt(2)); ln(m) = 2 atanh(s) with |s| < 0.172.
  const double s = (m - 1.0) / (m + 1.0);
  const double s2 = s * s;
  double series = 0.0;
  for (int n = 12; n >= 1; --n) series = 1.0 / (2 * n + 1) + s2 * series;
  const double lnm = 2.0 * s + 2.0 * s * s2 * series;
  const double kd = static_cast<double>(k);
  return (kd * kLn2Hi + lnm) + kd * kLn2Lo;
}

double pow(double base, double e) {
  if (e == 0.0) return 1.0;
  if (e == 1.0) return base;
  if (base == 1.0) return 1.0;
  if (base == 0.0) return e > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return exp(e * log(base));
}

double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + exp(-z));
  const double ez = exp(z);
  return ez / (1.0 + ez);
}

double logit(double p) { return log(p / (1.0 - p)); }

}  // namespace mfp::detmath
