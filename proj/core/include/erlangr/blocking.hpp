#pragma once

#include <iosfwd>
#include <vector>

#include "erlangr/model.hpp"

namespace erlangr {

/// Stationary law of the Erlang-R model with blocking.
///
/// The product form pi(j, k) = a_j b_k / Z over {j + k <= n} is stored as the
/// log factors log a_j, log b_k and log Z, so memory is O(n) and nothing
/// overflows for populations in the tens of thousands. Entries are formed on
/// demand by prob().
class BlockingDistribution {
 public:
  BlockingDistribution(const ModelParams& params, CapacityPair cap);

  /// pi(j, k); 0 outside the state space.
  double prob(int j, int k) const;

  /// log pi(j, k); -inf outside the state space.
  double log_prob(int j, int k) const;

  /// P(needy count = j), j = 0..population.
  std::vector<double> needy_marginal() const { return needy_marginal(cap_.n); }

  /// Needy marginal of the same network closed at a smaller population m <= n.
  std::vector<double> needy_marginal(int m) const;

  /// P(j + k = i), i = 0..n.
  std::vector<double> census_marginal() const;

  /// E[k], the mean content count.
  double mean_content() const;

  const ModelParams& params() const { return params_; }
  CapacityPair capacity() const { return cap_; }
  const DerivedLoads& loads() const { return loads_; }

 private:
  double log_norm(int m) const;

  ModelParams params_;
  CapacityPair cap_;
  DerivedLoads loads_;
  std::vector<double> log_a_;      // j log R1 - log kappa(j)
  std::vector<double> log_b_;      // k log R2 - log k!
  std::vector<double> log_bsum_;   // log sum_{k <= m} b_k
  std::vector<double> log_kbsum_;  // log sum_{k <= m} k b_k
  double log_z_ = 0.0;
};

BlockingDistribution stationary_blocking(const ModelParams& params, CapacityPair cap);

/// Performance measures. With `arrival_theorem` the delay probability and
/// wait are taken from the population-(n-1) law seen by an arriving request;
/// otherwise from the time-stationary law.
PerformanceReport perf_blocking(const BlockingDistribution& dist, bool arrival_theorem = true);

/// CSV `j,k,prob`, one row per state, 17 significant digits.
void write_csv(std::ostream& os, const BlockingDistribution& dist);

}  // namespace erlangr
