#include "erlangr/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <deque>
#include <exception>
#include <iomanip>
#include <limits>
#include <locale>
#include <mutex>
#include <ostream>
#include <queue>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "erlangr/errors.hpp"

namespace erlangr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxVisitStratum = 60;
constexpr double kStochasticOrderTol = 0.01;

// One independent stream per (seed, replication).
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x5eedu};
    eng_.seed(seq);
  }

  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }
  std::size_t index(std::size_t size) {
    return std::min(size - 1, static_cast<std::size_t>(uniform() * static_cast<double>(size)));
  }

 private:
  std::mt19937_64 eng_;
};

// Time integrals and event counts over one stretch of simulated time.
struct Window {
  double time = 0.0;
  double delay_time = 0.0;  // Q1 >= s
  double busy = 0.0;        // busy / s
  double beds = 0.0;        // census / n
  double holding = 0.0;
  double waiting = 0.0;
  double census = 0.0;
  double needy = 0.0;
  double per_nurse = 0.0;
  double servers = 0.0;
  long arrivals = 0;
  long boundary = 0;
  long requests = 0;
  long delayed = 0;
  long started = 0;
  double wait_sum = 0.0;
  long admissions = 0;
  double hold_wait_sum = 0.0;

  void merge(const Window& o) {
    time += o.time;
    delay_time += o.delay_time;
    busy += o.busy;
    beds += o.beds;
    holding += o.holding;
    waiting += o.waiting;
    census += o.census;
    needy += o.needy;
    per_nurse += o.per_nurse;
    servers += o.servers;
    arrivals += o.arrivals;
    boundary += o.boundary;
    requests += o.requests;
    delayed += o.delayed;
    started += o.started;
    wait_sum += o.wait_sum;
    admissions += o.admissions;
    hold_wait_sum += o.hold_wait_sum;
  }
};

double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

std::size_t bin_count(const SimConfig& cfg) {
  const double span = cfg.fold_period ? *cfg.fold_period : cfg.horizon;
  return static_cast<std::size_t>(std::ceil(span / cfg.bin_width - 1e-9));
}

struct StratumAcc {
  long count = 0;
  double sum[3] = {0.0, 0.0, 0.0};
  double sumsq[3] = {0.0, 0.0, 0.0};
};

struct RepOutput {
  std::vector<Window> batches;
  std::vector<Window> bins;
  std::vector<double> census_time;
  std::vector<double> needy_time;
  std::vector<StratumAcc> strata;
  std::vector<long> visit_counts;
  FlowCounts flow;
  std::vector<PathEvent> log;

  Window total() const {
    Window w;
    for (const auto& b : batches) w.merge(b);
    return w;
  }
};

struct Patient {
  long id = 0;
  double arrival = 0.0;
  double admitted = 0.0;
  double request_start = 0.0;
  double needy_wait = 0.0;
  int visits = 0;
};

enum class CalendarKind { Horizon, Warmup, Batch, Bin, Schedule };

struct CalendarEvent {
  double t;
  CalendarKind kind;
  bool operator>(const CalendarEvent& o) const { return t > o.t; }
};

struct Scenario {
  ModelParams params;
  SimModel model = SimModel::Holding;
  CapacityPair cap;                           // stationary capacity
  const ArrivalProfile* profile = nullptr;    // time-varying arrivals when set
  const StaffingSchedule* schedule = nullptr;  // time-varying capacity when set
  int max_n = 1;
};

class Engine {
 public:
  Engine(const Scenario& sc, const SimConfig& cfg, int replication)
      : sc_(sc),
        cfg_(cfg),
        rng_(cfg.seed, static_cast<std::uint64_t>(replication)),
        log_paths_(cfg.record_paths && replication == 0),
        warmup_(cfg.warmup_time()) {
    out_.batches.resize(cfg.batches);
    if (cfg.bin_width > 0.0) {
      out_.bins.resize(bin_count(cfg));
    }
    out_.census_time.assign(sc.max_n + 1, 0.0);
    out_.needy_time.assign(sc.max_n + 1, 0.0);
    if (cfg.record_paths) {
      out_.strata.resize(kMaxVisitStratum + 1);
      out_.visit_counts.assign(kMaxVisitStratum + 1, 0);
    }
    cap_ = sc.schedule ? sc.schedule->at(0.0) : sc.cap;
    lambda_max_ = sc.profile ? sc.profile->max_rate() : sc.params.lambda;
    if (sc.model == SimModel::ClosedWard) lambda_max_ = 0.0;
  }

  RepOutput run() {
    schedule_calendar();
    if (sc_.model == SimModel::ClosedWard) {
      for (int i = 0; i < cap_.n; ++i) {
        const int p = new_patient(0.0);
        pool_[p].admitted = 0.0;
        content_.push_back(p);
        ++out_.flow.admitted;
      }
    }
    const double mu = sc_.params.mu;
    const double delta = sc_.params.delta;
    while (true) {
      const double arr = lambda_max_;
      const double svc = static_cast<double>(in_service_.size()) * mu;
      const double ret = static_cast<double>(content_.size()) * delta;
      const double total = arr + svc + ret;
      const double dt = total > 0.0 ? rng_.exponential(total) : kInf;
      const double next_cal = calendar_.top().t;
      if (now_ + dt >= next_cal) {
        advance(next_cal);
        const CalendarEvent ev = calendar_.top();
        calendar_.pop();
        if (ev.kind == CalendarKind::Horizon) break;
        on_calendar(ev);
        continue;
      }
      advance(now_ + dt);
      const double u = rng_.uniform() * total;
      if (u < arr) {
        if (!sc_.profile || rng_.uniform() * lambda_max_ < sc_.profile->rate(now_)) on_arrival();
      } else if (u < arr + svc) {
        on_service_completion();
      } else {
        on_content_completion();
      }
      if (!sc_.schedule && census() > cap_.n) {
        throw std::logic_error("census bound violated: " + std::to_string(census()) + " > n = " +
                               std::to_string(cap_.n));
      }
    }
    out_.flow.in_system_end = census();
    out_.flow.holding_end = static_cast<long>(holding_.size());
    return std::move(out_);
  }

 private:
  int census() const {
    return static_cast<int>(in_service_.size() + waiting_.size() + content_.size());
  }
  int needy() const { return static_cast<int>(in_service_.size() + waiting_.size()); }

  void schedule_calendar() {
    calendar_.push({cfg_.horizon, CalendarKind::Horizon});
    calendar_.push({warmup_, CalendarKind::Warmup});
    const double len = (cfg_.horizon - warmup_) / cfg_.batches;
    for (int b = 1; b < cfg_.batches; ++b) calendar_.push({warmup_ + b * len, CalendarKind::Batch});
    if (!out_.bins.empty()) {
      for (double t = cfg_.bin_width; t < cfg_.horizon; t += cfg_.bin_width) {
        calendar_.push({t, CalendarKind::Bin});
      }
      if (cfg_.fold_period) {
        for (double t = *cfg_.fold_period; t < cfg_.horizon; t += *cfg_.fold_period) {
          calendar_.push({t, CalendarKind::Bin});
        }
      }
    }
    if (sc_.schedule) {
      for (std::size_t k = 1; k < sc_.schedule->s.size(); ++k) {
        const double t = static_cast<double>(k) * sc_.schedule->interval;
        if (t < cfg_.horizon) calendar_.push({t, CalendarKind::Schedule});
      }
    }
  }

  void on_calendar(const CalendarEvent& ev) {
    switch (ev.kind) {
      case CalendarKind::Warmup:
        batch_ = 0;
        break;
      case CalendarKind::Batch:
        batch_ = std::min(batch_ + 1, cfg_.batches - 1);
        break;
      case CalendarKind::Bin:
        bin_ = bin_index(ev.t);
        break;
      case CalendarKind::Schedule:
        cap_ = sc_.schedule->at(ev.t);
        dispatch();
        admit_from_holding();
        break;
      case CalendarKind::Horizon:
        break;
    }
  }

  // Integrates the piecewise-constant state up to t.
  void advance(double t) {
    const double dt = t - now_;
    if (dt > 0.0) {
      const int q1 = needy();
      const int n_in = census();
      const double busy = static_cast<double>(in_service_.size());
      auto add = [&](Window& w) {
        w.time += dt;
        if (q1 >= cap_.s) w.delay_time += dt;
        w.busy += dt * busy / cap_.s;
        w.beds += dt * std::min(1.0, static_cast<double>(n_in) / cap_.n);
        w.holding += dt * static_cast<double>(holding_.size());
        w.waiting += dt * static_cast<double>(waiting_.size());
        w.census += dt * n_in;
        w.needy += dt * q1;
        w.per_nurse += dt * static_cast<double>(n_in) / cap_.s;
        w.servers += dt * cap_.s;
      };
      if (batch_ >= 0) {
        add(out_.batches[batch_]);
        out_.census_time[std::min(n_in, sc_.max_n)] += dt;
        out_.needy_time[std::min(q1, sc_.max_n)] += dt;
      }
      if (!out_.bins.empty() && batch_ >= 0) add(out_.bins[bin_]);
    }
    now_ = t;
  }

  template <class F>
  void count(F&& f) {
    if (batch_ < 0) return;
    f(out_.batches[batch_]);
    if (!out_.bins.empty()) f(out_.bins[bin_]);
  }

  int bin_index(double t) const {
    const double tau = cfg_.fold_period ? std::fmod(t, *cfg_.fold_period) : t;
    const auto k = static_cast<int>(std::floor(tau / cfg_.bin_width + 1e-9));
    return std::clamp(k, 0, static_cast<int>(out_.bins.size()) - 1);
  }

  void log(const Patient& p, const char* what) {
    if (log_paths_ && out_.log.size() < cfg_.max_logged_events) {
      out_.log.push_back({p.id, what, now_});
    }
  }

  int new_patient(double t) {
    int idx;
    if (!free_.empty()) {
      idx = free_.back();
      free_.pop_back();
    } else {
      idx = static_cast<int>(pool_.size());
      pool_.emplace_back();
    }
    Patient& p = pool_[idx];
    p = Patient{};
    p.id = next_id_++;
    p.arrival = t;
    log(p, "arrive");
    return idx;
  }

  void release(int idx) { free_.push_back(idx); }

  void on_arrival() {
    ++out_.flow.arrivals;
    count([](Window& w) { ++w.arrivals; });
    const int p = new_patient(now_);
    if (holding_.empty() && census() < cap_.n) {
      admit(p);
      return;
    }
    count([](Window& w) { ++w.boundary; });
    if (sc_.model == SimModel::Blocking) {
      ++out_.flow.blocked;
      log(pool_[p], "block");
      release(p);
    } else {
      ++out_.flow.held;
      log(pool_[p], "hold");
      holding_.push_back(p);
    }
  }

  void admit(int p) {
    if (census() >= cap_.n) throw std::logic_error("admission attempted into a full facility");
    Patient& pt = pool_[p];
    pt.admitted = now_;
    ++out_.flow.admitted;
    const double hold_wait = now_ - pt.arrival;
    if (pt.arrival >= warmup_) {
      count([&](Window& w) {
        ++w.admissions;
        w.hold_wait_sum += hold_wait;
      });
    }
    log(pt, "admit");
    request(p);
  }

  void request(int p) {
    Patient& pt = pool_[p];
    ++pt.visits;
    pt.request_start = now_;
    log(pt, "request");
    const bool free_server = waiting_.empty() && static_cast<int>(in_service_.size()) < cap_.s;
    count([&](Window& w) {
      ++w.requests;
      if (!free_server) ++w.delayed;
    });
    if (free_server) {
      start(p);
    } else {
      waiting_.push_back(p);
    }
  }

  void start(int p) {
    Patient& pt = pool_[p];
    const double wait = now_ - pt.request_start;
    pt.needy_wait += wait;
    count([&](Window& w) {
      ++w.started;
      w.wait_sum += wait;
    });
    log(pt, "start");
    in_service_.push_back(p);
  }

  void dispatch() {
    while (!waiting_.empty() && static_cast<int>(in_service_.size()) < cap_.s) {
      const int p = waiting_.front();
      waiting_.pop_front();
      start(p);
    }
  }

  void admit_from_holding() {
    while (!holding_.empty() && census() < cap_.n) {
      const int p = holding_.front();
      holding_.pop_front();
      admit(p);
    }
  }

  void on_service_completion() {
    const std::size_t k = rng_.index(in_service_.size());
    const int p = in_service_[k];
    in_service_[k] = in_service_.back();
    in_service_.pop_back();
    const bool returns = rng_.uniform() < sc_.params.p;
    if (returns) {
      log(pool_[p], "content");
      content_.push_back(p);
    } else {
      depart(p);
    }
    dispatch();
    if (!returns) {
      if (sc_.model == SimModel::ClosedWard) {
        const int q = new_patient(now_);
        admit(q);
      } else if (sc_.model == SimModel::Holding) {
        admit_from_holding();
      }
    }
  }

  void on_content_completion() {
    const std::size_t k = rng_.index(content_.size());
    const int p = content_[k];
    content_[k] = content_.back();
    content_.pop_back();
    request(p);
  }

  void depart(int p) {
    Patient& pt = pool_[p];
    ++out_.flow.departed;
    log(pt, "depart");
    if (cfg_.record_paths && pt.arrival >= warmup_) {
      const int v = std::min(pt.visits, kMaxVisitStratum);
      ++out_.visit_counts[v];
      StratumAcc& acc = out_.strata[v];
      const double pre = pt.admitted - pt.arrival;
      const double vals[3] = {pre, pt.needy_wait, pre + pt.needy_wait};
      ++acc.count;
      for (int i = 0; i < 3; ++i) {
        acc.sum[i] += vals[i];
        acc.sumsq[i] += vals[i] * vals[i];
      }
    }
    release(p);
  }

  const Scenario& sc_;
  const SimConfig& cfg_;
  Rng rng_;
  bool log_paths_;
  double warmup_;
  double now_ = 0.0;
  double lambda_max_ = 0.0;
  CapacityPair cap_;
  int batch_ = -1;
  int bin_ = 0;
  long next_id_ = 0;

  std::vector<Patient> pool_;
  std::vector<int> free_;
  std::vector<int> in_service_;
  std::deque<int> waiting_;
  std::vector<int> content_;
  std::deque<int> holding_;
  std::priority_queue<CalendarEvent, std::vector<CalendarEvent>, std::greater<>> calendar_;
  RepOutput out_;
};

double t_quantile(int samples) {
  if (samples < 2) return 0.0;
  const boost::math::students_t dist(samples - 1);
  return boost::math::quantile(boost::math::complement(dist, 0.025));
}

Estimate from_samples(const std::vector<double>& xs, std::optional<double> pooled = {}) {
  Estimate e;
  const auto k = static_cast<double>(xs.size());
  if (xs.empty()) return e;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= k;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  e.mean = pooled ? *pooled : mean;
  if (xs.size() >= 2) e.half_width = t_quantile(static_cast<int>(xs.size())) * std::sqrt(ss / (k - 1.0) / k);
  return e;
}

std::vector<RepOutput> run_replications(const Scenario& sc, const SimConfig& cfg) {
  const int reps = cfg.replications;
  std::vector<RepOutput> outs(reps);
  int workers = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, reps);
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto work = [&] {
    for (int r = next++; r < reps; r = next++) {
      try {
        outs[r] = Engine(sc, cfg, r).run();
      } catch (...) {
        const std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return outs;
}

template <class F>
Estimate estimate(const std::vector<RepOutput>& outs, F metric) {
  std::vector<double> xs;
  if (outs.size() >= 2) {
    for (const auto& o : outs) xs.push_back(metric(o.total()));
    return from_samples(xs);
  }
  for (const auto& b : outs[0].batches) xs.push_back(metric(b));
  return from_samples(xs, metric(outs[0].total()));
}

template <class F>
Estimate bin_estimate(const std::vector<RepOutput>& outs, std::size_t k, F metric) {
  std::vector<double> xs;
  for (const auto& o : outs) xs.push_back(metric(o.bins[k]));
  return from_samples(xs);
}

std::vector<double> tail(const std::vector<double>& mass, double total, int n) {
  std::vector<double> out(n + 1, 0.0);
  double acc = 0.0;
  for (int k = static_cast<int>(mass.size()) - 1; k >= 0; --k) {
    acc += mass[k];
    if (k <= n) out[k] = ratio(acc, total);
  }
  return out;
}

SimResult reduce(const std::vector<RepOutput>& outs, const SimConfig& cfg, int max_n) {
  SimResult res;
  res.replications = static_cast<int>(outs.size());
  res.ci_method = outs.size() >= 2 ? "replications" : "batch-means";

  res.p_delay = estimate(outs, [](const Window& w) { return ratio(w.delay_time, w.time); });
  res.p_delay_request =
      estimate(outs, [](const Window& w) { return ratio(double(w.delayed), double(w.requests)); });
  res.p_boundary =
      estimate(outs, [](const Window& w) { return ratio(double(w.boundary), double(w.arrivals)); });
  res.e_wait = estimate(outs, [](const Window& w) { return ratio(w.wait_sum, double(w.started)); });
  res.e_holding_queue = estimate(outs, [](const Window& w) { return ratio(w.holding, w.time); });
  res.e_holding_wait =
      estimate(outs, [](const Window& w) { return ratio(w.hold_wait_sum, double(w.admissions)); });
  res.rho_s = estimate(outs, [](const Window& w) { return ratio(w.busy, w.time); });
  res.rho_n = estimate(outs, [](const Window& w) { return ratio(w.beds, w.time); });
  res.e_needy_queue = estimate(outs, [](const Window& w) { return ratio(w.waiting, w.time); });
  res.request_rate = estimate(outs, [](const Window& w) { return ratio(double(w.requests), w.time); });
  res.mean_census = estimate(outs, [](const Window& w) { return ratio(w.census, w.time); });

  std::vector<double> census(max_n + 1, 0.0);
  std::vector<double> needy(max_n + 1, 0.0);
  double time = 0.0;
  for (const auto& o : outs) {
    for (int k = 0; k <= max_n; ++k) {
      census[k] += o.census_time[k];
      needy[k] += o.needy_time[k];
    }
    time += o.total().time;
  }
  res.census_tail = tail(census, time, max_n);
  res.needy_tail = tail(needy, time, max_n);

  if (cfg.record_paths) {
    res.visit_counts.assign(kMaxVisitStratum + 1, 0);
    for (const auto& o : outs) {
      for (int v = 0; v <= kMaxVisitStratum; ++v) res.visit_counts[v] += o.visit_counts[v];
    }
    for (int v = 1; v <= kMaxVisitStratum; ++v) {
      VisitStratum st;
      st.visits = v;
      Estimate* fields[3] = {&st.pre_entrant_wait, &st.needy_wait, &st.total_wait};
      for (const auto& o : outs) st.patients += o.strata[v].count;
      if (st.patients == 0) continue;
      for (int i = 0; i < 3; ++i) {
        if (outs.size() >= 2) {
          std::vector<double> xs;
          for (const auto& o : outs) {
            if (o.strata[v].count > 0) xs.push_back(o.strata[v].sum[i] / o.strata[v].count);
          }
          *fields[i] = from_samples(xs);
        } else {
          const StratumAcc& a = outs[0].strata[v];
          const double m = a.sum[i] / a.count;
          const double var = a.count > 1 ? std::max(0.0, (a.sumsq[i] - a.count * m * m) / (a.count - 1)) : 0.0;
          *fields[i] = {m, 1.96 * std::sqrt(var / a.count)};
        }
      }
      res.visit_strata.push_back(st);
    }
  }

  if (!outs[0].bins.empty()) {
    for (std::size_t k = 0; k < outs[0].bins.size(); ++k) {
      TimeBin b;
      b.t_start = static_cast<double>(k) * cfg.bin_width;
      b.t_end = std::min(cfg.fold_period ? *cfg.fold_period : cfg.horizon, b.t_start + cfg.bin_width);
      b.p_delay = bin_estimate(outs, k, [](const Window& w) { return ratio(double(w.delayed), double(w.requests)); });
      b.p_boundary = bin_estimate(outs, k, [](const Window& w) { return ratio(double(w.boundary), double(w.arrivals)); });
      b.holding = bin_estimate(outs, k, [](const Window& w) { return ratio(w.holding, w.time); });
      b.needy = bin_estimate(outs, k, [](const Window& w) { return ratio(w.needy, w.time); });
      b.census = bin_estimate(outs, k, [](const Window& w) { return ratio(w.census, w.time); });
      b.patients_per_nurse = bin_estimate(outs, k, [](const Window& w) { return ratio(w.per_nurse, w.time); });
      b.servers = bin_estimate(outs, k, [](const Window& w) { return ratio(w.servers, w.time); });
      res.time_series.push_back(b);
    }
  }

  for (const auto& o : outs) {
    res.flow.arrivals += o.flow.arrivals;
    res.flow.admitted += o.flow.admitted;
    res.flow.departed += o.flow.departed;
    res.flow.blocked += o.flow.blocked;
    res.flow.held += o.flow.held;
    res.flow.in_system_end += o.flow.in_system_end;
    res.flow.holding_end += o.flow.holding_end;
  }
  res.event_log = outs[0].log;
  return res;
}

std::string fmt_double(double x) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(10) << x;
  return os.str();
}

}  // namespace

const char* to_string(SimModel m) {
  switch (m) {
    case SimModel::Blocking:
      return "blocking";
    case SimModel::Holding:
      return "holding";
    case SimModel::ClosedWard:
      return "closed_ward";
  }
  return "unknown";
}

SimModel sim_model_from_string(const std::string& name) {
  if (name == "blocking") return SimModel::Blocking;
  if (name == "holding") return SimModel::Holding;
  if (name == "closed_ward" || name == "closed-ward") return SimModel::ClosedWard;
  throw DomainError("unknown model '" + name + "' (expected blocking, holding or closed_ward)");
}

void SimConfig::validate() const {
  if (!(horizon > 0.0)) throw DomainError("simulation horizon must be positive");
  const double w = warmup_time();
  if (!(w >= 0.0 && w < horizon)) throw DomainError("warmup must lie in [0, horizon)");
  if (replications < 1) throw DomainError("replications must be at least 1");
  if (batches < 2) throw DomainError("batch means need at least 2 batches");
  if (bin_width < 0.0) throw DomainError("bin width must be nonnegative");
  if (fold_period && !(*fold_period > 0.0 && bin_width > 0.0)) {
    throw DomainError("folding needs a positive period and bin width");
  }
}

SimResult simulate(const ModelParams& params, CapacityPair cap, const SimConfig& cfg) {
  params.validate();
  validate(cap);
  cfg.validate();
  Scenario sc;
  sc.params = params;
  sc.model = cfg.model;
  sc.cap = cap;
  sc.max_n = cap.n;
  return reduce(run_replications(sc, cfg), cfg, sc.max_n);
}

SimResult time_varying_simulate(const ArrivalProfile& profile, const StaffingSchedule& schedule,
                                const ModelParams& params, const SimConfig& cfg) {
  params.validate();
  profile.validate();
  cfg.validate();
  if (cfg.model == SimModel::ClosedWard) {
    throw DomainError("time-varying simulation supports the blocking and holding models");
  }
  if (schedule.s.empty() || schedule.horizon() < cfg.horizon - 1e-9) {
    throw ScheduleGap("staffing schedule covers [0, " + fmt_double(schedule.horizon()) +
                      ") but the horizon is " + fmt_double(cfg.horizon));
  }
  Scenario sc;
  sc.params = params;
  sc.model = cfg.model;
  sc.profile = &profile;
  sc.schedule = &schedule;
  sc.cap = schedule.at(0.0);
  sc.max_n = *std::max_element(schedule.n.begin(), schedule.n.end());
  return reduce(run_replications(sc, cfg), cfg, sc.max_n);
}

bool ordered_within_ci(const Estimate& a, const Estimate& b) {
  return a.mean <= b.mean + std::max(a.half_width, b.half_width);
}

OrderingReport ordering_experiment(const ModelParams& params, CapacityPair cap,
                                   const SimConfig& cfg) {
  OrderingReport rep;
  SimConfig c = cfg;
  c.model = SimModel::Blocking;
  rep.blocking = simulate(params, cap, c);
  c.model = SimModel::Holding;
  rep.holding = simulate(params, cap, c);
  c.model = SimModel::ClosedWard;
  rep.closed_ward = simulate(params, cap, c);

  const Estimate full{static_cast<double>(cap.n), 0.0};
  rep.census_ordered = ordered_within_ci(rep.blocking.mean_census, rep.holding.mean_census) &&
                       ordered_within_ci(rep.holding.mean_census, full);
  rep.boundary_ordered = ordered_within_ci(rep.blocking.p_boundary, rep.holding.p_boundary);
  rep.bed_use_ordered = ordered_within_ci(rep.blocking.rho_n, rep.holding.rho_n);
  rep.delay_ordered = ordered_within_ci(rep.blocking.p_delay, rep.holding.p_delay) &&
                      ordered_within_ci(rep.holding.p_delay, rep.closed_ward.p_delay);
  rep.needy_stochastic_order = true;
  for (int k = 0; k <= cap.n; ++k) {
    const double b = rep.blocking.needy_tail[k];
    const double h = rep.holding.needy_tail[k];
    const double w = rep.closed_ward.needy_tail[k];
    if (b > h + kStochasticOrderTol || h > w + kStochasticOrderTol) {
      rep.needy_stochastic_order = false;
    }
  }
  return rep;
}

void write_time_series_csv(std::ostream& os, const SimResult& res) {
  std::ostringstream buf;
  buf.imbue(std::locale::classic());
  buf << std::setprecision(10);
  buf << "t,metric,value\n";
  for (const auto& b : res.time_series) {
    const std::pair<const char*, double> rows[] = {
        {"p_delay", b.p_delay.mean},
        {"p_boundary", b.p_boundary.mean},
        {"holding", b.holding.mean},
        {"needy", b.needy.mean},
        {"census", b.census.mean},
        {"patients_per_nurse", b.patients_per_nurse.mean},
        {"servers", b.servers.mean},
    };
    for (const auto& [name, value] : rows) buf << b.t_start << ',' << name << ',' << value << '\n';
  }
  os << buf.str();
}

void write_event_log_csv(std::ostream& os, const SimResult& res) {
  std::ostringstream buf;
  buf.imbue(std::locale::classic());
  buf << std::setprecision(10);
  buf << "patient_id,event,t\n";
  for (const auto& e : res.event_log) buf << e.patient_id << ',' << e.event << ',' << e.t << '\n';
  os << buf.str();
}

}  // namespace erlangr
