#pragma once

#include <optional>

#include "erlangr/model.hpp"

namespace erlangr {

/// Solution of alpha = f_b(beta - alpha, gamma - alpha/sqrt(r)).
struct FixedPointSolution {
  double alpha = 0.0;
  double effective_beta = 0.0;   ///< beta - alpha
  double effective_gamma = 0.0;  ///< gamma - alpha/sqrt(r); may be negative
  long iterations = 0;
  double residual = 0.0;         ///< |alpha - f_b(effective pair)|
  double bisection_alpha = 0.0;  ///< independent root of the same equation
  bool roots_agree = true;       ///< |alpha - bisection_alpha| < 1e-8
};

/// Damped iteration (d = 0.5) from alpha = 0; after 10^4 steps the smallest root
/// above the last iterate is bracketed directly. Throws Infeasible unless beta > 0
/// and gamma > 0, or when no root exists.
FixedPointSolution solve_alpha(QedPair pair, double r);

struct HoldingApprox {
  double g = 0.0;  ///< delay probability
  double h = 0.0;  ///< sqrt(R1) * mean wait
  FixedPointSolution fixed_point;
};

/// Blocking limits evaluated at the effective pair of the fixed point.
HoldingApprox holding_approx(QedPair pair, double r, double mu = 1.0);

/// Coordinate held fixed while the other is solved for.
enum class Pin {
  BetaStar,   ///< pre-adjustment server hedge
  GammaStar,  ///< pre-adjustment bed hedge
  Beta,       ///< final server hedge
  Gamma,      ///< final bed hedge
  Servers,    ///< final s; beta from inversion
  Beds,       ///< final n; gamma from inversion
};

struct PinnedCoordinate {
  Pin which = Pin::GammaStar;
  double value = 0.0;
};

struct DimensioningResult {
  QedPair pair;       ///< final hedges
  QedPair star_pair;  ///< hedges before the re-admission adjustment
  CapacityPair cap;
  PerformanceReport predicted;  ///< limit-based, unscaled by sqrt(R1)
  std::optional<FixedPointSolution> fixed_point;  ///< holding dimensioning only
};

/// Solves g_b(beta, gamma) = target for the free coordinate. For this model
/// the starred and final pins coincide.
DimensioningResult dimension_blocking(double target_delay, PinnedCoordinate fixed,
                                      const DerivedLoads& loads, double mu = 1.0);

/// Holding-model dimensioning. A starred pin runs the inflation algorithm:
/// solve g_b(beta*, gamma*) = target, then add f_b(beta*, gamma*) to beta* and
/// f_b/sqrt(r) to gamma*. A final pin (Beta, Gamma, Servers, Beds) solves the
/// fixed-point prediction g_h(beta, gamma) = target directly.
DimensioningResult dimension_holding(double target_delay, PinnedCoordinate fixed,
                                     const ModelParams& params);

}  // namespace erlangr
