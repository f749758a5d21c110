#pragma once

#include <iosfwd>
#include <vector>

namespace erlangr {

/// Hedge pair plus needy fraction, with the two derived arguments of the limit formulas.
struct LimitInputs {
  double beta = 0.0;
  double gamma = 0.0;
  double r = 0.5;

  /// (gamma - beta sqrt(r)) / sqrt(1 - r)
  double eta() const;
  /// (gamma - beta / sqrt(r)) / sqrt(1 - r)
  double omega() const;
};

/// QED limits of the blocking model.
struct BlockingLimits {
  double g = 0.0;  ///< delay probability
  double f = 0.0;  ///< sqrt(R1) * blocking probability
  double h = 0.0;  ///< sqrt(R1) * mean wait
};

struct LossLimits {
  double g = 0.0;
  double f = 0.0;
};

/// Below this |beta| the beta = 0 closed forms are used.
inline constexpr double kBetaZeroThreshold = 1e-8;

/// int_{-inf}^{beta} Phi((gamma - t sqrt(r)) / sqrt(1 - r)) phi(t) dt, absolute error ~1e-12.
double gaussian_mix_integral(double beta, double gamma, double r);

/// Limits (g, f, h) of delay probability, scaled blocking probability and scaled wait.
/// Throws DomainError unless 0 < r < 1.
BlockingLimits limits_blocking(const LimitInputs& in, double mu = 1.0);

/// Halfin-Whitt delay probability (1 + beta Phi(beta)/phi(beta))^-1, beta > 0.
double halfin_whitt_delay(double beta);

/// r = 1 limits of the M/M/s/n loss-delay model; requires gamma > beta.
LossLimits loss_model_limits(double beta, double gamma);

/// sqrt(r) phi(gamma) / Phi(gamma), the large-beta floor of f.
double erlang_b_tail(double gamma, double r);

struct LimitRow {
  LimitInputs in;
  BlockingLimits out;
};

/// Reads `beta,gamma,r` rows (header optional) and evaluates each.
std::vector<LimitRow> evaluate_limit_grid(std::istream& csv, double mu = 1.0);

/// Writes `beta,gamma,r,g,f,h` rows.
void write_limit_rows(std::ostream& os, const std::vector<LimitRow>& rows);

}  // namespace erlangr
