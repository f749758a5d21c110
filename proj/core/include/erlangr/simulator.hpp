#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "erlangr/mol.hpp"
#include "erlangr/model.hpp"

namespace erlangr {

enum class SimModel {
  Blocking,    ///< arrivals finding n patients inside are lost
  Holding,     ///< such arrivals queue outside until a bed frees up
  ClosedWard,  ///< always n patients; a departure is replaced by a new needy patient
};

const char* to_string(SimModel m);
SimModel sim_model_from_string(const std::string& name);

struct SimConfig {
  double horizon = 10'000.0;
  std::optional<double> warmup;  ///< default: 20% of the horizon
  int replications = 1;
  std::uint64_t seed = 1;
  SimModel model = SimModel::Holding;
  bool record_paths = false;  ///< per-patient statistics and the event log
  int batches = 30;           ///< batch means when replications == 1
  double bin_width = 0.0;     ///< > 0 enables the binned time series (after warmup only)
  std::optional<double> fold_period;  ///< bins over [0, period), accumulated across cycles
  int threads = 0;            ///< 0: hardware concurrency
  std::size_t max_logged_events = 1'000'000;

  double warmup_time() const { return warmup ? *warmup : 0.2 * horizon; }
  void validate() const;
};

/// Point estimate with a 95% confidence half-width.
struct Estimate {
  double mean = 0.0;
  double half_width = 0.0;
};

/// Per realized visit count, over patients that arrived after warmup and left.
struct VisitStratum {
  int visits = 0;
  long patients = 0;
  Estimate pre_entrant_wait;  ///< time in the holding queue
  Estimate needy_wait;        ///< summed over all service requests
  Estimate total_wait;
};

/// Binned averages. Probabilities are ratios of event counts inside the bin.
struct TimeBin {
  double t_start = 0.0;
  double t_end = 0.0;
  Estimate p_delay;           ///< service requests that waited
  Estimate p_boundary;        ///< arrivals blocked or held
  Estimate holding;           ///< time-average holding queue
  Estimate needy;             ///< time-average Q1
  Estimate census;            ///< time-average Q1 + Q2
  Estimate patients_per_nurse;  ///< time-average (Q1 + Q2) / s(t)
  Estimate servers;           ///< time-average s(t)
};

struct FlowCounts {
  long arrivals = 0;
  long admitted = 0;  ///< includes the initial closed-ward population
  long departed = 0;
  long blocked = 0;
  long held = 0;
  long in_system_end = 0;  ///< inside the facility at the horizon
  long holding_end = 0;
};

struct PathEvent {
  long patient_id = 0;
  std::string event;
  double t = 0.0;
};

struct SimResult {
  Estimate p_delay;          ///< time-stationary P(Q1 >= s)
  Estimate p_delay_request;  ///< fraction of service requests that wait
  Estimate p_boundary;       ///< fraction of arrivals blocked or held
  Estimate e_wait;           ///< mean needy wait per service request
  Estimate e_holding_queue;  ///< time-average holding queue length
  Estimate e_holding_wait;   ///< mean pre-entrant wait per admitted arrival
  Estimate rho_s;
  Estimate rho_n;
  Estimate e_needy_queue;    ///< time-average number waiting for a server
  Estimate request_rate;     ///< service requests per unit time
  Estimate mean_census;      ///< time-average Q1 + Q2

  std::vector<double> census_tail;  ///< P(Q1 + Q2 >= k), k = 0..n
  std::vector<double> needy_tail;   ///< P(Q1 >= k), k = 0..n

  std::vector<VisitStratum> visit_strata;
  std::vector<long> visit_counts;  ///< [k] = departed patients with k visits

  std::vector<TimeBin> time_series;
  std::vector<PathEvent> event_log;  ///< replication 0 only

  FlowCounts flow;  ///< summed over replications
  int replications = 0;
  std::string ci_method;  ///< "replications" or "batch-means"
};

/// Stationary simulation of one of the three models.
SimResult simulate(const ModelParams& params, CapacityPair cap, const SimConfig& cfg);

/// Simulation driven by a time-varying arrival rate and staffing schedule.
/// Throws ScheduleGap unless the schedule covers the horizon.
SimResult time_varying_simulate(const ArrivalProfile& profile, const StaffingSchedule& schedule,
                                const ModelParams& params, const SimConfig& cfg);

struct OrderingReport {
  SimResult blocking;
  SimResult holding;
  SimResult closed_ward;

  bool census_ordered = false;  ///< E[census] blocking <= holding <= n, within CI
  bool boundary_ordered = false;  ///< P(block) <= P(hold), within CI
  bool bed_use_ordered = false;   ///< rho_n blocking <= holding, within CI
  bool delay_ordered = false;     ///< P(delay) blocking <= holding <= closed ward, within CI
  bool needy_stochastic_order = false;  ///< P(Q1 >= k) ordered for every k, within tolerance
};

/// Runs the three models on the same parameters and checks the orderings.
OrderingReport ordering_experiment(const ModelParams& params, CapacityPair cap,
                                   const SimConfig& cfg);

/// True when a <= b up to the larger of the two half-widths.
bool ordered_within_ci(const Estimate& a, const Estimate& b);

/// CSV `t,metric,value` of the binned series.
void write_time_series_csv(std::ostream& os, const SimResult& res);

/// CSV `patient_id,event,t`.
void write_event_log_csv(std::ostream& os, const SimResult& res);

}  // namespace erlangr
