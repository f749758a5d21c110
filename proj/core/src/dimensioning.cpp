#include "erlangr/dimensioning.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "erlangr/errors.hpp"
#include "erlangr/qed_limits.hpp"

namespace erlangr {

namespace {

constexpr double kDamping = 0.5;
constexpr double kFixedPointTol = 1e-10;
constexpr long kFixedPointMaxIter = 10'000;
constexpr double kRootsAgreeTol = 1e-8;
constexpr double kHedgeLimit = 40.0;
constexpr double kPositiveFloor = 1e-9;
constexpr double kTargetTol = 1e-6;
constexpr double kScanStep = 1e-4;
constexpr double kScanSpan = 20.0;

double f_blocking(double beta, double gamma, double r) {
  return limits_blocking({beta, gamma, r}).f;
}

// g_h for bracketing, with `fallback` where the fixed point does not exist.
// Past the edge in beta every request waits (fallback 1). In gamma, g_h falls
// as the edge is approached, so the edge sits on the low side (fallback 0).
double delay_or(QedPair pair, double r, double fallback) {
  try {
    return holding_approx(pair, r).g;
  } catch (const Infeasible&) {
    return fallback;
  } catch (const ConvergenceError&) {
    return fallback;
  }
}

double psi(double alpha, QedPair pair, double r) {
  return alpha - f_blocking(pair.beta - alpha, pair.gamma - alpha / std::sqrt(r), r);
}

double bisect_alpha(QedPair pair, double r) {
  double lo = 0.0;
  double hi = std::max(pair.beta + pair.gamma * std::sqrt(r), 1e-3);
  for (int k = 0; k < 60 && psi(hi, pair, r) < 0.0; ++k) hi *= 2.0;
  for (int k = 0; k < 200 && hi - lo > 1e-14; ++k) {
    const double mid = 0.5 * (lo + hi);
    (psi(mid, pair, r) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Smallest root of psi at or above `from`, where psi(from) < 0.
double first_root_above(double from, QedPair pair, double r) {
  double lo = from;
  for (double step = kScanStep; lo < from + kScanSpan; lo += step) {
    const double hi = lo + step;
    const double v = psi(hi, pair, r);
    if (!std::isfinite(v)) break;
    if (v >= 0.0) {
      double a = lo;
      double b = hi;
      for (int k = 0; k < 200 && b - a > 1e-15; ++k) {
        const double mid = 0.5 * (a + b);
        (psi(mid, pair, r) < 0.0 ? a : b) = mid;
      }
      return 0.5 * (a + b);
    }
  }
  throw Infeasible("fixed-point equation has no admissible root");
}

// Root of f(x) = target for monotone f, starting from [lo, hi] and widening
// toward [lo_limit, hi_limit] until the target is bracketed.
template <class F>
double solve_monotone(const F& f, double target, bool increasing, double lo, double hi,
                      double lo_limit, double hi_limit) {
  auto side = [&](double x) {
    const double v = f(x);
    if (!std::isfinite(v)) {
      throw InfeasibleTarget("delay prediction undefined at hedge " + std::to_string(x));
    }
    return increasing ? v - target : target - v;
  };
  double width = hi - lo;
  while (side(lo) > 0.0) {
    if (lo <= lo_limit) throw InfeasibleTarget("target delay not reachable: bracket exhausted");
    lo = std::max(lo_limit, lo - width);
    width *= 2.0;
  }
  width = hi - lo;
  while (side(hi) < 0.0) {
    if (hi >= hi_limit) throw InfeasibleTarget("target delay not reachable: bracket exhausted");
    hi = std::min(hi_limit, hi + width);
    width *= 2.0;
  }
  for (int k = 0; k < 200 && hi - lo > 1e-13; ++k) {
    const double mid = 0.5 * (lo + hi);
    (side(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void require_target(double target) {
  if (!(target > 0.0 && target < 1.0)) {
    throw DomainError("target delay probability must lie in (0, 1)");
  }
}

void check_halfin_whitt(double beta, double target) {
  if (beta > 0.0 && target >= halfin_whitt_delay(beta)) {
    throw InfeasibleTarget("target " + std::to_string(target) +
                           " is at or above the Halfin-Whitt bound " +
                           std::to_string(halfin_whitt_delay(beta)) + " for beta = " +
                           std::to_string(beta));
  }
}

bool pins_beta(Pin p) { return p == Pin::BetaStar || p == Pin::Beta || p == Pin::Servers; }

double pinned_value(PinnedCoordinate fixed, const DerivedLoads& loads) {
  if (fixed.which == Pin::Servers || fixed.which == Pin::Beds) {
    const CapacityPair cap{static_cast<int>(std::lround(fixed.value)),
                           static_cast<int>(std::lround(fixed.value))};
    validate(cap);
    const QedPair inv = invert_capacity(cap, loads.r1, loads.r);
    return fixed.which == Pin::Servers ? inv.beta : inv.gamma;
  }
  return fixed.value;
}

QedPair solve_blocking_pair(double target, bool beta_fixed, double value, double r) {
  if (beta_fixed) {
    check_halfin_whitt(value, target);
    const auto g = [&](double gamma) { return limits_blocking({value, gamma, r}).g; };
    return {value, solve_monotone(g, target, true, -5.0, 5.0, -kHedgeLimit, kHedgeLimit)};
  }
  const auto g = [&](double beta) { return limits_blocking({beta, value, r}).g; };
  return {solve_monotone(g, target, false, -5.0, 5.0, -kHedgeLimit, kHedgeLimit), value};
}

PerformanceReport blocking_prediction(QedPair pair, const DerivedLoads& loads, CapacityPair cap,
                                      double mu) {
  const BlockingLimits lim = limits_blocking({pair.beta, pair.gamma, loads.r}, mu);
  const double scale = std::sqrt(loads.r1);
  PerformanceReport rep;
  rep.p_delay = lim.g;
  rep.p_boundary = lim.f / scale;
  rep.e_wait = lim.h / scale;
  const double carried = 1.0 - std::min(1.0, rep.p_boundary);
  rep.rho_s = std::min(1.0, loads.r1 * carried / cap.s);
  rep.rho_n = std::min(1.0, loads.bed_load() * carried / cap.n);
  rep.p_delay_request = rep.p_delay;
  rep.e_wait_request = rep.e_wait;
  return rep;
}

PerformanceReport holding_prediction(const HoldingApprox& approx, const DerivedLoads& loads,
                                     CapacityPair cap) {
  const double scale = std::sqrt(loads.r1);
  PerformanceReport rep;
  rep.p_delay = approx.g;
  rep.p_boundary = std::min(1.0, approx.fixed_point.alpha / scale);
  rep.e_wait = approx.h / scale;
  rep.rho_s = std::min(1.0, loads.r1 / cap.s);
  rep.rho_n = std::min(1.0, loads.bed_load() / cap.n);
  rep.p_delay_request = rep.p_delay;
  rep.e_wait_request = rep.e_wait;
  return rep;
}

}  // namespace

FixedPointSolution solve_alpha(QedPair pair, double r) {
  if (!(r > 0.0 && r < 1.0)) throw DomainError("fixed point needs 0 < r < 1");
  if (!(pair.beta > 0.0) || !(pair.gamma > 0.0)) {
    throw Infeasible("holding heuristic needs beta > 0 and gamma > 0 (got beta = " +
                     std::to_string(pair.beta) + ", gamma = " + std::to_string(pair.gamma) + ")");
  }
  const double sr = std::sqrt(r);
  FixedPointSolution sol;
  double alpha = 0.0;
  for (long it = 1; it <= kFixedPointMaxIter; ++it) {
    const double f = f_blocking(pair.beta - alpha, pair.gamma - alpha / sr, r);
    if (!std::isfinite(f)) throw Infeasible("fixed-point iterate diverged; no admissible alpha");
    const double residual = std::abs(alpha - f);
    if (residual < kFixedPointTol) {
      sol.alpha = alpha;
      sol.iterations = it;
      sol.residual = residual;
      break;
    }
    if (it == kFixedPointMaxIter) {
      alpha = first_root_above(alpha, pair, r);
      sol.alpha = alpha;
      sol.iterations = it;
      sol.residual = std::abs(psi(alpha, pair, r));
      break;
    }
    alpha = (1.0 - kDamping) * alpha + kDamping * f;
  }
  sol.effective_beta = pair.beta - sol.alpha;
  sol.effective_gamma = pair.gamma - sol.alpha / sr;
  sol.bisection_alpha = bisect_alpha(pair, r);
  sol.roots_agree = std::abs(sol.bisection_alpha - sol.alpha) < kRootsAgreeTol;
  return sol;
}

HoldingApprox holding_approx(QedPair pair, double r, double mu) {
  HoldingApprox out;
  out.fixed_point = solve_alpha(pair, r);
  const BlockingLimits lim =
      limits_blocking({out.fixed_point.effective_beta, out.fixed_point.effective_gamma, r}, mu);
  out.g = lim.g;
  out.h = lim.h;
  return out;
}

DimensioningResult dimension_blocking(double target_delay, PinnedCoordinate fixed,
                                      const DerivedLoads& loads, double mu) {
  require_target(target_delay);
  const double value = pinned_value(fixed, loads);
  DimensioningResult res;
  res.pair = solve_blocking_pair(target_delay, pins_beta(fixed.which), value, loads.r);
  res.star_pair = res.pair;
  res.cap = qed_capacity(loads.r1, loads.r, res.pair);
  res.predicted = blocking_prediction(res.pair, loads, res.cap, mu);
  return res;
}

DimensioningResult dimension_holding(double target_delay, PinnedCoordinate fixed,
                                     const ModelParams& params) {
  require_target(target_delay);
  const DerivedLoads loads = derive_loads(params);
  const double r = loads.r;
  const double value = pinned_value(fixed, loads);
  DimensioningResult res;

  if (fixed.which == Pin::BetaStar || fixed.which == Pin::GammaStar) {
    res.star_pair = solve_blocking_pair(target_delay, fixed.which == Pin::BetaStar, value, r);
    const double f = f_blocking(res.star_pair.beta, res.star_pair.gamma, r);
    res.pair = {res.star_pair.beta + f, res.star_pair.gamma + f / std::sqrt(r)};
  } else if (pins_beta(fixed.which)) {
    check_halfin_whitt(value, target_delay);
    const auto g = [&](double gamma) { return delay_or({value, gamma}, r, 0.0); };
    res.pair = {value, solve_monotone(g, target_delay, true, 0.05, 5.0, kPositiveFloor, kHedgeLimit)};
    if (std::abs(delay_or(res.pair, r, 0.0) - target_delay) > kTargetTol) {
      throw InfeasibleTarget("target " + std::to_string(target_delay) +
                             " is below the smallest holding delay reachable with beta = " +
                             std::to_string(value));
    }
  } else {
    if (!(value > 0.0)) {
      throw InfeasibleTarget("pinned bed hedge gamma = " + std::to_string(value) +
                             " leaves the holding model without a stable fixed point");
    }
    const auto g = [&](double beta) { return delay_or({beta, value}, r, 1.0); };
    res.pair = {solve_monotone(g, target_delay, false, 0.05, 5.0, kPositiveFloor, kHedgeLimit),
                value};
  }

  const HoldingApprox approx = holding_approx(res.pair, r, params.mu);
  if (fixed.which != Pin::BetaStar && fixed.which != Pin::GammaStar) {
    res.star_pair = {approx.fixed_point.effective_beta, approx.fixed_point.effective_gamma};
  }
  res.fixed_point = approx.fixed_point;
  res.cap = qed_capacity(loads.r1, r, res.pair);
  res.predicted = holding_prediction(approx, loads, res.cap);
  return res;
}

}  // namespace erlangr
