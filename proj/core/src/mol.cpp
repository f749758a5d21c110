#include "erlangr/mol.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <locale>
#include <ostream>
#include <sstream>
#include <string>

#include "erlangr/errors.hpp"

namespace erlangr {

namespace {

constexpr int kWarmPeriods = 3;

double lerp(double t0, double v0, double t1, double v1, double t) {
  if (t1 == t0) return v0;
  return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
}

double interp(const std::vector<double>& t, const std::vector<double>& v, double x) {
  if (x <= t.front()) return v.front();
  if (x >= t.back()) return v.back();
  const auto it = std::upper_bound(t.begin(), t.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - t.begin());
  return lerp(t[i - 1], v[i - 1], t[i], v[i], x);
}

struct Loads {
  double r1;
  double r2;
};

class LoadOde {
 public:
  LoadOde(const ArrivalProfile& profile, const ModelParams& params)
      : profile_(profile), p_(params) {}

  Loads deriv(double t, Loads y) const {
    return {profile_.rate(t) + p_.delta * y.r2 - p_.mu * y.r1, p_.p * p_.mu * y.r1 - p_.delta * y.r2};
  }

  Loads step(double t, Loads y, double h) const {
    const Loads k1 = deriv(t, y);
    const Loads k2 = deriv(t + 0.5 * h, {y.r1 + 0.5 * h * k1.r1, y.r2 + 0.5 * h * k1.r2});
    const Loads k3 = deriv(t + 0.5 * h, {y.r1 + 0.5 * h * k2.r1, y.r2 + 0.5 * h * k2.r2});
    const Loads k4 = deriv(t + h, {y.r1 + h * k3.r1, y.r2 + h * k3.r2});
    return {y.r1 + h / 6.0 * (k1.r1 + 2.0 * k2.r1 + 2.0 * k3.r1 + k4.r1),
            y.r2 + h / 6.0 * (k1.r2 + 2.0 * k2.r2 + 2.0 * k3.r2 + k4.r2)};
  }

 private:
  const ArrivalProfile& profile_;
  ModelParams p_;
};

std::string fmt(double x) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(10) << x;
  return os.str();
}

}  // namespace

void ArrivalProfile::validate() const {
  if (breakpoints.empty() || breakpoints.size() != rates.size()) {
    throw DomainError("arrival profile needs matching, nonempty breakpoints and rates");
  }
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (!(rates[i] >= 0.0) || !std::isfinite(rates[i])) {
      throw DomainError("arrival rates must be finite and nonnegative");
    }
    if (i > 0 && !(breakpoints[i] > breakpoints[i - 1])) {
      throw DomainError("profile breakpoints must be strictly ascending");
    }
  }
  if (period && !(*period > 0.0 && breakpoints.back() - breakpoints.front() <= *period)) {
    throw DomainError("profile period must be positive and cover the breakpoints");
  }
}

double ArrivalProfile::rate(double t) const {
  if (!period) return interp(breakpoints, rates, t);
  const double p = *period;
  double tau = std::fmod(t, p);
  if (tau < 0.0) tau += p;
  if (tau < breakpoints.front()) {
    return lerp(breakpoints.back() - p, rates.back(), breakpoints.front(), rates.front(), tau);
  }
  if (tau > breakpoints.back()) {
    return lerp(breakpoints.back(), rates.back(), breakpoints.front() + p, rates.front(), tau);
  }
  return interp(breakpoints, rates, tau);
}

double ArrivalProfile::max_rate() const { return *std::max_element(rates.begin(), rates.end()); }

double ArrivalProfile::mean_rate() const {
  std::vector<double> knots;
  double lo = breakpoints.front();
  double hi = breakpoints.back();
  if (period) {
    lo = 0.0;
    hi = *period;
  }
  if (hi <= lo) return rates.front();
  knots.push_back(lo);
  for (double b : breakpoints) {
    double tau = period ? std::fmod(b, *period) : b;
    if (tau < 0.0) tau += *period;
    if (tau > lo && tau < hi) knots.push_back(tau);
  }
  knots.push_back(hi);
  std::sort(knots.begin(), knots.end());
  double area = 0.0;
  for (std::size_t i = 1; i < knots.size(); ++i) {
    area += 0.5 * (knots[i] - knots[i - 1]) * (rate(knots[i - 1]) + rate(knots[i]));
  }
  return area / (hi - lo);
}

ArrivalProfile ArrivalProfile::constant(double lambda, double period) {
  return ArrivalProfile{{0.0}, {lambda}, period};
}

ArrivalProfile ArrivalProfile::scaled(double factor) const {
  ArrivalProfile out = *this;
  for (double& r : out.rates) r *= factor;
  return out;
}

double LoadTrajectory::r1_at(double time) const { return interp(t, r1, time); }

double LoadTrajectory::r2_at(double time) const { return interp(t, r2, time); }

LoadTrajectory integrate_offered_load(const ArrivalProfile& profile, const ModelParams& params,
                                      double horizon, double step) {
  profile.validate();
  params.validate();
  if (!(step > 0.0)) throw DomainError("integration step must be positive");
  if (!(horizon > 0.0)) throw DomainError("horizon must be positive");

  const LoadOde ode(profile, params);
  const double exit = 1.0 - params.p;
  const double lam0 = profile.period ? profile.mean_rate() : profile.rate(0.0);
  Loads y{lam0 / (exit * params.mu), params.p * lam0 / (exit * params.delta)};

  if (profile.period) {
    const double warm = kWarmPeriods * *profile.period;
    const long steps = static_cast<long>(std::ceil(warm / step - 1e-9));
    const double h = warm / static_cast<double>(steps);
    for (long k = 0; k < steps; ++k) y = ode.step(k * h, y, h);
  }

  const long steps = static_cast<long>(std::ceil(horizon / step - 1e-9));
  const double h = horizon / static_cast<double>(steps);
  LoadTrajectory traj;
  traj.t.reserve(steps + 1);
  traj.r1.reserve(steps + 1);
  traj.r2.reserve(steps + 1);
  traj.t.push_back(0.0);
  traj.r1.push_back(y.r1);
  traj.r2.push_back(y.r2);
  for (long k = 0; k < steps; ++k) {
    y = ode.step(k * h, y, h);
    traj.t.push_back((k + 1) * h);
    traj.r1.push_back(std::max(0.0, y.r1));
    traj.r2.push_back(std::max(0.0, y.r2));
  }
  return traj;
}

std::size_t StaffingSchedule::index_at(double t) const {
  if (!(t >= 0.0) || !(t < horizon())) {
    throw ScheduleGap("staffing schedule covers [0, " + fmt(horizon()) + "), queried at t = " +
                      fmt(t));
  }
  return std::min(s.size() - 1, static_cast<std::size_t>(t / interval));
}

CapacityPair StaffingSchedule::at(double t) const {
  const std::size_t k = index_at(t);
  return {s[k], n[k]};
}

StaffingSchedule StaffingSchedule::constant(CapacityPair cap, double horizon, double interval) {
  validate(cap);
  const auto count = static_cast<std::size_t>(std::ceil(horizon / interval - 1e-9));
  StaffingSchedule out;
  out.interval = interval;
  out.s.assign(count, cap.s);
  out.n.assign(count, cap.n);
  return out;
}

StaffingSchedule mol_schedule(const LoadTrajectory& traj, QedPair pair, double interval) {
  if (!(interval > 0.0)) throw DomainError("staffing interval must be positive");
  if (traj.t.size() < 2) throw DomainError("trajectory needs at least two points");
  const double span = traj.t.back() - traj.t.front();
  const auto count = static_cast<std::size_t>(std::ceil(span / interval - 1e-9));
  StaffingSchedule out;
  out.interval = interval;
  out.pair = pair;
  out.s.reserve(count);
  out.n.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double mid = traj.t.front() + (static_cast<double>(k) + 0.5) * interval;
    const double r1 = traj.r1_at(mid);
    const double bed = r1 + traj.r2_at(mid);
    CapacityPair cap;
    if (r1 > 0.0) cap = qed_capacity(r1, std::min(1.0, r1 / bed), pair);
    out.s.push_back(cap.s);
    out.n.push_back(cap.n);
  }
  return out;
}

void write_csv(std::ostream& os, const StaffingSchedule& schedule) {
  std::ostringstream buf;
  buf.imbue(std::locale::classic());
  buf << std::setprecision(10);
  buf << "t_start,t_end,s,n\n";
  for (std::size_t k = 0; k < schedule.s.size(); ++k) {
    buf << schedule.interval * k << ',' << schedule.interval * (k + 1) << ',' << schedule.s[k]
        << ',' << schedule.n[k] << '\n';
  }
  os << buf.str();
}

void write_csv(std::ostream& os, const LoadTrajectory& traj) {
  std::ostringstream buf;
  buf.imbue(std::locale::classic());
  buf << std::setprecision(10);
  buf << "t,r1,r2\n";
  for (std::size_t k = 0; k < traj.t.size(); ++k) {
    buf << traj.t[k] << ',' << traj.r1[k] << ',' << traj.r2[k] << '\n';
  }
  os << buf.str();
}

}  // namespace erlangr
