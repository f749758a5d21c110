#pragma once

#include <optional>

namespace erlangr {

/// Primitive rates of an Erlang-R instance.
///
/// Customers arrive at rate `lambda`, need a server for an Exp(`mu`) time,
/// then either leave (probability 1-p) or spend an Exp(`delta`) content
/// period and return to the needy queue (probability p).
struct ModelParams {
  double lambda = 0.0;
  double mu = 0.0;
  double delta = 0.0;
  double p = 0.0;

  /// Throws DomainError unless lambda, mu, delta > 0 and 0 <= p < 1.
  void validate() const;
};

/// Offered loads derived from ModelParams.
struct DerivedLoads {
  double r1 = 0.0;  ///< needy-station offered load, lambda/((1-p) mu)
  double r2 = 0.0;  ///< content-station offered load, p lambda/((1-p) delta)
  double r = 1.0;   ///< needy-time fraction, delta/(delta + p mu)
  std::optional<double> rho;  ///< r1/s, when a server count is known

  /// Offered load seen by the beds, r1 + r2 (= r1/r).
  double bed_load() const { return r1 + r2; }
};

struct CapacityPair {
  int s = 1;  ///< servers
  int n = 1;  ///< beds (maximum concurrent customers inside)

  friend bool operator==(const CapacityPair&, const CapacityPair&) = default;
};

/// Square-root hedges for servers (beta) and beds (gamma).
struct QedPair {
  double beta = 0.0;
  double gamma = 0.0;

  friend bool operator==(const QedPair&, const QedPair&) = default;
};

/// How the bed count is rounded in qed_capacity. Servers are always rounded up.
enum class BedRounding {
  Floor,    ///< n = floor(.), the dimensioning-algorithm convention
  Nearest,  ///< n = round(.), the convention used for the tabulated experiments
};

DerivedLoads derive_loads(const ModelParams& params);
DerivedLoads derive_loads(const ModelParams& params, CapacityPair cap);

/// s = ceil(r1 + beta sqrt(r1)), n = floor(r1/r + gamma sqrt(r1/r)); both clamped to >= 1.
CapacityPair qed_capacity(double r1, double r, QedPair pair, BedRounding rounding = BedRounding::Floor);

/// beta = (s - r1)/sqrt(r1), gamma = (n - r1/r)/sqrt(r1/r).
QedPair invert_capacity(CapacityPair cap, double r1, double r);

void validate(CapacityPair cap);

/// The five congestion measures shared by the exact, asymptotic and simulated analyses.
struct PerformanceReport {
  double p_delay = 0.0;          ///< all servers busy (time-stationary for holding)
  double p_boundary = 0.0;       ///< an arrival is blocked (blocking) or held (holding)
  double e_wait = 0.0;           ///< mean needy-queue wait per service request
  double e_holding_queue = 0.0;  ///< mean number waiting outside for a bed; 0 for blocking
  double rho_s = 0.0;            ///< server utilization
  double rho_n = 0.0;            ///< bed utilization
  double p_delay_request = 0.0;  ///< fraction of service requests that must wait
  double e_wait_request = 0.0;   ///< mean needy wait averaged over service requests
};

}  // namespace erlangr
