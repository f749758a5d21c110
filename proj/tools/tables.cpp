#include "tables.hpp"

#include <cmath>
#include <fstream>

#include "erlangr/blocking.hpp"
#include "erlangr/dimensioning.hpp"
#include "erlangr/errors.hpp"
#include "erlangr/holding.hpp"
#include "erlangr/qed_limits.hpp"
#include "erlangr/simulator.hpp"
#include "io.hpp"

namespace erlangr::cli {

namespace {

struct Case {
  int id;
  double delta;
  double p;
};

// mu = 1 throughout; r = delta/(delta + p) is 0.1, 0.25, 0.5.
constexpr Case kCases[] = {{1, 0.10, 0.90}, {2, 0.25, 0.75}, {3, 0.50, 0.50}};
constexpr double kHedges[] = {1.0, 2.0};

class Csv {
 public:
  Csv(const std::filesystem::path& file, const std::string& header) : out_(file) {
    if (!out_) throw DomainError("cannot write " + file.string());
    out_ << header << '\n';
  }

  Csv& operator<<(double x) { return field(num(x)); }
  Csv& operator<<(int x) { return field(std::to_string(x)); }
  Csv& operator<<(const std::string& x) { return field(x); }
  Csv& operator<<(const char* x) { return field(x); }

  void end() {
    out_ << '\n';
    first_ = true;
  }

 private:
  Csv& field(const std::string& s) {
    if (!first_) out_ << ',';
    out_ << s;
    first_ = false;
    return *this;
  }

  std::ofstream out_;
  bool first_ = true;
};

ModelParams case_params(const Case& c, double r1) { return {r1 * (1.0 - c.p), 1.0, c.delta, c.p}; }

void blocking_accuracy(const std::filesystem::path& file, const TablesOptions& opts) {
  Csv csv(file, "case,r,beta,gamma,kind,r1,s,n,p_delay,scaled_p_block,scaled_e_wait");
  for (const Case& c : kCases) {
    for (double beta : kHedges) {
      for (double gamma : kHedges) {
        double r = 0.0;
        for (double r1 : opts.r1_values) {
          const ModelParams p = case_params(c, r1);
          const DerivedLoads l = derive_loads(p);
          r = l.r;
          const CapacityPair cap = qed_capacity(l.r1, l.r, {beta, gamma}, BedRounding::Nearest);
          const PerformanceReport rep = perf_blocking(stationary_blocking(p, cap));
          const double scale = std::sqrt(l.r1);
          csv << c.id << r << beta << gamma << "exact" << r1 << cap.s << cap.n << rep.p_delay
              << scale * rep.p_boundary << scale * rep.e_wait;
          csv.end();
        }
        const BlockingLimits lim = limits_blocking({beta, gamma, r});
        csv << c.id << r << beta << gamma << "limit" << "" << "" << "" << lim.g << lim.f << lim.h;
        csv.end();
      }
    }
  }
}

void holding_accuracy(const std::filesystem::path& file, const TablesOptions& opts) {
  Csv csv(file, "case,r,beta,gamma,kind,r1,s,n,p_delay,scaled_e_wait");
  for (const Case& c : kCases) {
    for (double beta : kHedges) {
      for (double gamma : kHedges) {
        const double r = c.delta / (c.delta + c.p);
        for (double r1 : opts.r1_values) {
          if (r1 > opts.holding_r1_max) continue;
          const ModelParams p = case_params(c, r1);
          const DerivedLoads l = derive_loads(p);
          const CapacityPair cap = qed_capacity(l.r1, l.r, {beta, gamma}, BedRounding::Nearest);
          csv << c.id << r << beta << gamma << "exact" << r1 << cap.s << cap.n;
          try {
            RateMatrixOptions ro;
            ro.method = GMethod::LogarithmicReduction;
            const PerformanceReport rep = perf_holding(solve_holding(p, cap, ro));
            csv << rep.p_delay_request << std::sqrt(l.r1) * rep.e_wait_request;
          } catch (const NotStable&) {
            csv << "" << "";
          }
          csv.end();
        }
        const HoldingApprox a = holding_approx({beta, gamma}, r);
        csv << c.id << r << beta << gamma << "approx" << "" << "" << "" << a.g << a.h;
        csv.end();
      }
    }
  }
}

void max_workload(const std::filesystem::path& file) {
  Csv csv(file, "r,s,n,r_max,rho_max");
  const ModelParams p{1.0, 1.0, 0.25, 0.75};
  for (int s = 1; s <= 30; ++s) {
    for (int n = 1; n <= 120; ++n) {
      const StabilityBound b = rho_max(p, {s, n});
      csv << 0.25 << s << n << b.r_max << b.rho_max;
      csv.end();
    }
  }
}

void limits_surface(const std::filesystem::path& file) {
  Csv csv(file, "r,gamma,beta,g,f,h");
  for (double gamma : {-1.0, 0.0, 1.0, 2.0}) {
    for (int k = -10; k <= 30; ++k) {
      const double beta = 0.1 * k;
      const BlockingLimits lim = limits_blocking({beta, gamma, 0.5});
      csv << 0.5 << gamma << beta << lim.g << lim.f << lim.h;
      csv.end();
    }
  }
}

void exact_vs_limits(const std::filesystem::path& file) {
  Csv csv(file, "model,s,n,beta,gamma,p_delay,scaled_p_boundary,limit_p_delay,limit_scaled_p_boundary");
  const ModelParams p{2.0, 1.0, 0.25, 0.75};
  const DerivedLoads l = derive_loads(p);
  const double scale = std::sqrt(l.r1);
  for (int n : {32, 36, 40, 44, 48}) {
    for (int s = 6; s <= 14; ++s) {
      const QedPair q = invert_capacity({s, n}, l.r1, l.r);
      const PerformanceReport b = perf_blocking(stationary_blocking(p, {s, n}));
      const BlockingLimits lim = limits_blocking({q.beta, q.gamma, l.r});
      csv << "blocking" << s << n << q.beta << q.gamma << b.p_delay << scale * b.p_boundary << lim.g << lim.f;
      csv.end();
      if (q.beta <= 0.0 || q.gamma <= 0.0) continue;
      try {
        const PerformanceReport h = perf_holding(solve_holding(p, {s, n}));
        csv << "holding" << s << n << q.beta << q.gamma << h.p_delay_request << scale * h.p_boundary
            << holding_approx(q, l.r).g << "";
        csv.end();
      } catch (const NotStable&) {
      } catch (const Infeasible&) {
      }
    }
  }
}

void medical_unit(const std::filesystem::path& file) {
  Csv csv(file, "gamma,beta,g_blocking,f_blocking,g_holding");
  const double r = derive_loads({0.32, 4.0, 0.4, 0.975}).r;
  for (double gamma : {0.5, 1.0, 2.0}) {
    for (int k = 1; k <= 60; ++k) {
      const double beta = 0.05 * k;
      const BlockingLimits lim = limits_blocking({beta, gamma, r});
      csv << gamma << beta << lim.g << lim.f;
      try {
        csv << holding_approx({beta, gamma}, r).g;
      } catch (const Infeasible&) {
        csv << "";
      }
      csv.end();
    }
  }
}

void influence_of_r(const std::filesystem::path& file) {
  Csv csv(file, "gamma,beta,r,g,f");
  for (double beta : {0.5, 1.0, 2.0}) {
    for (int k = 1; k < 50; ++k) {
      const double r = 0.02 * k;
      const BlockingLimits lim = limits_blocking({beta, 1.0, r});
      csv << 1.0 << beta << r << lim.g << lim.f;
      csv.end();
    }
  }
}

void policy_comparison(const std::filesystem::path& file) {
  Csv csv(file, "r,beta,gamma,g_halfin_whitt,g_blocking,g_holding");
  for (double r : {0.1, 0.25, 0.5}) {
    for (double beta : {0.5, 1.0}) {
      const double hw = halfin_whitt_delay(beta);
      for (int k = -10; k <= 30; ++k) {
        const double gamma = 0.1 * k;
        csv << r << beta << gamma << hw << limits_blocking({beta, gamma, r}).g;
        try {
          csv << holding_approx({beta, gamma}, r).g;
        } catch (const Infeasible&) {
          csv << "";
        }
        csv.end();
      }
    }
  }
}

void simulated_ordering(const std::filesystem::path& file, const TablesOptions& opts) {
  Csv csv(file, "lambda,s,n,model,metric,mean,half_width");
  for (double lambda : {5.0, 10.0, 25.0, 50.0, 100.0}) {
    const ModelParams p{lambda, 1.0, 0.2, 0.8};
    const DerivedLoads l = derive_loads(p);
    const CapacityPair cap = qed_capacity(l.r1, l.r, {0.5, 0.5});
    SimConfig cfg;
    cfg.horizon = opts.sim_horizon;
    cfg.replications = opts.sim_replications;
    cfg.seed = opts.seed;
    const OrderingReport rep = ordering_experiment(p, cap, cfg);
    const std::pair<const char*, const SimResult*> models[] = {
        {"blocking", &rep.blocking}, {"holding", &rep.holding}, {"closed_ward", &rep.closed_ward}};
    for (const auto& [name, res] : models) {
      const std::pair<const char*, Estimate> metrics[] = {{"p_delay", res->p_delay},
                                                          {"e_wait", res->e_wait},
                                                          {"rho_s", res->rho_s},
                                                          {"p_boundary", res->p_boundary}};
      for (const auto& [metric, e] : metrics) {
        csv << lambda << cap.s << cap.n << name << metric << e.mean << e.half_width;
        csv.end();
      }
    }
  }
}

}  // namespace

std::vector<std::string> write_tables(const std::filesystem::path& dir, const TablesOptions& opts) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> files;
  const auto run = [&](const char* name, auto&& fn) {
    fn(dir / name);
    files.emplace_back(name);
  };
  run("blocking_accuracy.csv", [&](const auto& f) { blocking_accuracy(f, opts); });
  run("holding_accuracy.csv", [&](const auto& f) { holding_accuracy(f, opts); });
  run("max_workload.csv", max_workload);
  run("blocking_limits_r05.csv", limits_surface);
  run("exact_vs_limits.csv", exact_vs_limits);
  run("medical_unit.csv", medical_unit);
  run("influence_of_r.csv", influence_of_r);
  run("policy_comparison.csv", policy_comparison);
  if (opts.simulate) run("simulated_ordering.csv", [&](const auto& f) { simulated_ordering(f, opts); });
  return files;
}

}  // namespace erlangr::cli
