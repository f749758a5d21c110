#include "erlangr/normal.hpp"

#include <cmath>
#include <numbers>

namespace erlangr::normal {

namespace {
constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kInvSqrtPi = std::numbers::inv_sqrtpi;
// Below this the direct product exp(x^2)*erfc(x) keeps ~14 digits.
constexpr double kContinuedFractionCut = 5.0;
constexpr int kContinuedFractionTerms = 90;
}  // namespace

double pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double erfcx(double x) {
  if (x < 0.0) {
    return 2.0 * std::exp(x * x) - erfcx(-x);
  }
  if (x < kContinuedFractionCut) {
    return std::exp(x * x) * std::erfc(x);
  }
  // Laplace continued fraction, evaluated bottom-up:
  // erfcx(x) = 1/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
  double t = x;
  for (int k = kContinuedFractionTerms; k >= 1; --k) {
    t = x + 0.5 * k / t;
  }
  return kInvSqrtPi / t;
}

double scaled_cdf(double w) { return 0.5 * erfcx(-w / kSqrt2); }

double damped_scaled_cdf(double a2, double w) {
  if (w <= 0.0) {
    return pdf(std::sqrt(a2)) * scaled_cdf(w);
  }
  return kInvSqrt2Pi * std::exp(0.5 * (w * w - a2)) * cdf(w);
}

double log_damped_scaled_cdf(double a2, double w) {
  const double log_norm = -0.5 * std::log(2.0 * std::numbers::pi);
  if (w <= 0.0) {
    return log_norm - 0.5 * a2 + std::log(scaled_cdf(w));
  }
  return log_norm + 0.5 * (w * w - a2) + std::log(cdf(w));
}

double pdf_over_cdf(double x) { return 2.0 * kInvSqrt2Pi / erfcx(-x / kSqrt2); }

double cdf_over_pdf(double x) { return 0.5 * kSqrt2Pi * erfcx(-x / kSqrt2); }

}  // namespace erlangr::normal
