#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "erlangr/model.hpp"

namespace erlangr {

/// Piecewise-linear arrival rate lambda(t).
struct ArrivalProfile {
  std::vector<double> breakpoints;  ///< strictly ascending times
  std::vector<double> rates;        ///< lambda at each breakpoint, >= 0
  std::optional<double> period;     ///< cycle length; the profile repeats when set

  /// Throws DomainError on mismatched sizes, descending times or negative rates.
  void validate() const;

  double rate(double t) const;
  double max_rate() const;
  /// Time average over one period (or over the breakpoint span without a period).
  double mean_rate() const;

  /// Flat profile; convenient for degenerate checks.
  static ArrivalProfile constant(double lambda, double period = 24.0);

  /// Same shape with every rate multiplied by `factor`.
  ArrivalProfile scaled(double factor) const;
};

/// Offered loads of the infinite-capacity network on a uniform grid.
struct LoadTrajectory {
  std::vector<double> t;
  std::vector<double> r1;
  std::vector<double> r2;

  /// Linear interpolation inside the grid; clamps at the ends.
  double r1_at(double time) const;
  double r2_at(double time) const;
};

/// RK4 integration of dR1/dt = lambda(t) + delta R2 - mu R1, dR2/dt = p mu R1 - delta R2
/// over [0, horizon]. A periodic profile is first run for three periods from the
/// stationary loads at its mean rate, so the returned path starts on the periodic orbit.
LoadTrajectory integrate_offered_load(const ArrivalProfile& profile, const ModelParams& params,
                                      double horizon, double step);

/// Piecewise-constant capacities, one entry per interval [k I, (k+1) I).
struct StaffingSchedule {
  double interval = 0.5;
  std::vector<int> s;
  std::vector<int> n;
  QedPair pair;

  double horizon() const { return interval * static_cast<double>(s.size()); }
  std::size_t index_at(double t) const;  ///< throws ScheduleGap outside [0, horizon)
  CapacityPair at(double t) const;

  static StaffingSchedule constant(CapacityPair cap, double horizon, double interval = 0.5);
};

/// s = ceil(R1 + beta sqrt(R1)), n = floor(R + gamma sqrt(R)) with R = R1 + R2,
/// both evaluated at each interval midpoint.
StaffingSchedule mol_schedule(const LoadTrajectory& traj, QedPair pair, double interval);

/// CSV `t_start,t_end,s,n`.
void write_csv(std::ostream& os, const StaffingSchedule& schedule);

/// CSV `t,r1,r2` of the trajectory.
void write_csv(std::ostream& os, const LoadTrajectory& traj);

}  // namespace erlangr
