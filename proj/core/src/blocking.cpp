#include "erlangr/blocking.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <locale>
#include <ostream>
#include <sstream>

#include "erlangr/detail/numeric.hpp"

namespace erlangr {

using detail::Accumulator;
using detail::kNegInf;
using detail::log_add_exp;

namespace {

double log_kappa(int j, int s) {
  if (j <= s) return std::lgamma(j + 1.0);
  return std::lgamma(s + 1.0) + (j - s) * std::log(static_cast<double>(s));
}

double log_power(int k, double x) {
  if (k == 0) return 0.0;
  return x > 0.0 ? k * std::log(x) : kNegInf;
}

}  // namespace

BlockingDistribution::BlockingDistribution(const ModelParams& params, CapacityPair cap)
    : params_(params), cap_(cap), loads_(derive_loads(params, cap)) {
  const int n = cap.n;
  log_a_.resize(n + 1);
  log_b_.resize(n + 1);
  log_bsum_.resize(n + 1);
  log_kbsum_.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    log_a_[i] = log_power(i, loads_.r1) - log_kappa(i, cap.s);
    log_b_[i] = log_power(i, loads_.r2) - std::lgamma(i + 1.0);
  }
  log_bsum_[0] = log_b_[0];
  log_kbsum_[0] = kNegInf;
  for (int k = 1; k <= n; ++k) {
    log_bsum_[k] = log_add_exp(log_bsum_[k - 1], log_b_[k]);
    log_kbsum_[k] = log_add_exp(log_kbsum_[k - 1], std::log(static_cast<double>(k)) + log_b_[k]);
  }
  log_z_ = log_norm(n);
}

double BlockingDistribution::log_norm(int m) const {
  double top = kNegInf;
  for (int j = 0; j <= m; ++j) top = std::max(top, log_a_[j] + log_bsum_[m - j]);
  Accumulator acc;
  for (int j = 0; j <= m; ++j) acc += std::exp(log_a_[j] + log_bsum_[m - j] - top);
  return top + std::log(acc.value());
}

double BlockingDistribution::log_prob(int j, int k) const {
  if (j < 0 || k < 0 || j + k > cap_.n) return kNegInf;
  return log_a_[j] + log_b_[k] - log_z_;
}

double BlockingDistribution::prob(int j, int k) const { return std::exp(log_prob(j, k)); }

std::vector<double> BlockingDistribution::needy_marginal(int m) const {
  m = std::clamp(m, 0, cap_.n);
  const double lz = m == cap_.n ? log_z_ : log_norm(m);
  std::vector<double> out(m + 1);
  for (int j = 0; j <= m; ++j) out[j] = std::exp(log_a_[j] + log_bsum_[m - j] - lz);
  return out;
}

std::vector<double> BlockingDistribution::census_marginal() const {
  const int n = cap_.n;
  std::vector<double> out(n + 1);
  std::vector<double> terms;
  for (int i = 0; i <= n; ++i) {
    terms.resize(i + 1);
    double top = kNegInf;
    for (int j = 0; j <= i; ++j) {
      terms[j] = log_a_[j] + log_b_[i - j];
      top = std::max(top, terms[j]);
    }
    if (top == kNegInf) continue;
    Accumulator acc;
    for (double t : terms) acc += std::exp(t - top);
    out[i] = std::exp(top - log_z_ + std::log(acc.value()));
  }
  return out;
}

double BlockingDistribution::mean_content() const {
  // sum_j a_j sum_{k <= n-j} k b_k / Z
  const int n = cap_.n;
  Accumulator acc;
  for (int j = 0; j < n; ++j) acc += std::exp(log_a_[j] + log_kbsum_[n - j] - log_z_);
  return acc.value();
}

BlockingDistribution stationary_blocking(const ModelParams& params, CapacityPair cap) {
  return BlockingDistribution(params, cap);
}

PerformanceReport perf_blocking(const BlockingDistribution& dist, bool arrival_theorem) {
  const int n = dist.capacity().n;
  const int s = dist.capacity().s;
  const double mu = dist.params().mu;

  PerformanceReport rep;

  Accumulator blocked;
  for (int j = 0; j <= n; ++j) blocked += dist.prob(j, n - j);
  rep.p_boundary = blocked.value();

  const std::vector<double> now = dist.needy_marginal();
  Accumulator busy;
  Accumulator needy;
  for (int j = 0; j <= n; ++j) {
    busy += std::min(j, s) * now[j];
    needy += j * now[j];
  }
  rep.rho_s = busy.value() / s;
  rep.rho_n = (needy.value() + dist.mean_content()) / n;

  const std::vector<double> seen = arrival_theorem ? dist.needy_marginal(n - 1) : now;
  Accumulator delay;
  Accumulator wait;
  for (int j = s; j < static_cast<int>(seen.size()); ++j) {
    delay += seen[j];
    wait += (j - s + 1) / (s * mu) * seen[j];
  }
  rep.p_delay = delay.value();
  rep.e_wait = wait.value();
  rep.e_holding_queue = 0.0;

  Accumulator req_delay;
  Accumulator req_wait;
  const std::vector<double> arriving = dist.needy_marginal(n - 1);
  for (int j = s; j < static_cast<int>(arriving.size()); ++j) {
    req_delay += arriving[j];
    req_wait += (j - s + 1) / (s * mu) * arriving[j];
  }
  rep.p_delay_request = req_delay.value();
  rep.e_wait_request = req_wait.value();
  return rep;
}

void write_csv(std::ostream& os, const BlockingDistribution& dist) {
  std::ostringstream buf;
  buf.imbue(std::locale::classic());
  buf << std::scientific << std::setprecision(16);
  buf << "j,k,prob\n";
  const int n = dist.capacity().n;
  for (int j = 0; j <= n; ++j) {
    for (int k = 0; j + k <= n; ++k) buf << j << ',' << k << ',' << dist.prob(j, k) << '\n';
  }
  os << buf.str();
}

}  // namespace erlangr
