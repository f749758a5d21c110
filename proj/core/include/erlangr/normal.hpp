#pragma once

// Standard normal helpers that stay finite in the tails.

namespace erlangr::normal {

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;
inline constexpr double kSqrt2Pi = 2.50662827463100050241576528481;

double pdf(double x);
double cdf(double x);

/// exp(x^2) * erfc(x), accurate for all finite x (overflows only for x < -26.6).
double erfcx(double x);

/// exp(w^2/2) * Phi(w) = erfcx(-w/sqrt2)/2. Finite for w < ~37.
double scaled_cdf(double w);

/// phi(sqrt(a2)) * exp(w^2/2) * Phi(w), evaluated without forming either
/// factor when that would over- or underflow. a2 >= 0.
double damped_scaled_cdf(double a2, double w);

/// log of damped_scaled_cdf(a2, w); finite where the value itself would overflow.
double log_damped_scaled_cdf(double a2, double w);

/// phi(x) / Phi(x), the inverse Mills ratio of the lower tail.
double pdf_over_cdf(double x);

/// Phi(x) / phi(x).
double cdf_over_pdf(double x);

}  // namespace erlangr::normal
