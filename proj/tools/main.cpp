// erlangr: command-line front end for the restricted Erlang-R library.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "erlangr/blocking.hpp"
#include "erlangr/dimensioning.hpp"
#include "erlangr/errors.hpp"
#include "erlangr/holding.hpp"
#include "erlangr/mol.hpp"
#include "erlangr/qed_limits.hpp"
#include "erlangr/simulator.hpp"
#include "io.hpp"
#include "tables.hpp"

using namespace erlangr;
using namespace erlangr::cli;

namespace {

enum Exit : int { kOk = 0, kUsage = 1, kUnstable = 2, kInfeasible = 3, kNumerical = 4 };

struct ParamOpts {
  double lambda = 0.0;
  double mu = 0.0;
  double delta = 0.0;
  double p = 0.0;

  ModelParams get() const {
    ModelParams m{lambda, mu, delta, p};
    m.validate();
    return m;
  }
};

void add_params(CLI::App* sub, ParamOpts& o, bool with_lambda = true) {
  if (with_lambda) sub->add_option("--lambda", o.lambda, "arrival rate")->required();
  sub->add_option("--mu", o.mu, "service rate")->required();
  sub->add_option("--delta", o.delta, "content-phase rate")->required();
  sub->add_option("--p", o.p, "return probability")->required();
}

void warn(const std::string& msg) { std::cerr << "warning: " << msg << '\n'; }

std::string render(const json& j, const std::string& format) {
  if (format == "csv") {
    std::ostringstream os;
    write_flat_csv(os, j);
    return os.str();
  }
  return j.dump(2) + "\n";
}

std::uint64_t effective_seed(std::optional<std::uint64_t> flag, std::uint64_t fallback) {
  if (const char* env = std::getenv("ERLANGR_SEED"); env && *env) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw DomainError(std::string("ERLANGR_SEED is not an unsigned integer: ") + env);
    }
  }
  return flag ? *flag : fallback;
}

// analyze

struct AnalyzeOpts {
  std::string model = "blocking";
  ParamOpts params;
  int s = 0;
  int n = 0;
  std::string format = "json";
  std::string output;
  std::string states;
  int extra_levels = 0;
  std::string solver = "auto";
  std::string g_method = "functional";
  bool time_stationary = false;
};

int cmd_analyze(const AnalyzeOpts& o) {
  const ModelParams p = o.params.get();
  const CapacityPair cap{o.s, o.n};
  validate(cap);
  if (cap.s > cap.n) warn("s > n; at most n servers can be busy");
  const DerivedLoads loads = derive_loads(p, cap);

  json j = {{"model", o.model},
            {"params", to_json(p)},
            {"capacity", {{"s", cap.s}, {"n", cap.n}}},
            {"loads", to_json(loads)}};
  const QedPair q = invert_capacity(cap, loads.r1, loads.r);
  j["qed"] = {{"beta", sig10(q.beta)}, {"gamma", sig10(q.gamma)}};

  std::ostringstream states;
  if (o.model == "blocking") {
    const BlockingDistribution d = stationary_blocking(p, cap);
    j["report"] = to_json(perf_blocking(d, !o.time_stationary));
    if (!o.states.empty()) write_csv(states, d);
  } else {
    const StabilityBound b = rho_max(p, cap);
    j["stability"] = {{"rho", sig10(*loads.rho)}, {"rho_max", sig10(b.rho_max)}, {"r_max", sig10(b.r_max)}};
    RateMatrixOptions ro;
    if (o.g_method == "lr") ro.method = GMethod::LogarithmicReduction;
    const std::map<std::string, BoundarySolver> solvers = {{"auto", BoundarySolver::Auto},
                                                           {"dense", BoundarySolver::DenseLU},
                                                           {"level", BoundarySolver::LevelReduction}};
    const HoldingDistribution d = solve_holding(p, cap, ro, solvers.at(o.solver));
    j["report"] = to_json(perf_holding(d));
    j["rate_matrix"] = {{"iterations", d.g.iterations},
                        {"residual", sig10(d.g.residual)},
                        {"spectral_radius", sig10(spectral_radius(d.g.g))}};
    if (!o.states.empty()) write_csv(states, d, o.extra_levels);
  }
  if (!o.states.empty()) emit(o.states, states.str());
  emit(o.output, render(j, o.format));
  return kOk;
}

// limits

struct LimitsOpts {
  std::optional<double> beta;
  std::optional<double> gamma;
  std::optional<double> r;
  double mu = 1.0;
  bool loss = false;
  bool blocking_only = false;
  std::string grid;
  std::string format = "json";
  std::string output;
};

int cmd_limits(const LimitsOpts& o) {
  if (!o.grid.empty()) {
    std::ifstream in(o.grid);
    if (!in) throw DomainError("cannot open " + o.grid);
    std::ostringstream os;
    write_limit_rows(os, evaluate_limit_grid(in, o.mu));
    emit(o.output, os.str());
    return kOk;
  }
  if (!o.beta || !o.gamma) throw CLI::RequiredError("--beta and --gamma");

  if (o.loss) {
    const LossLimits l = loss_model_limits(*o.beta, *o.gamma);
    const json j = {{"inputs", {{"beta", sig10(*o.beta)}, {"gamma", sig10(*o.gamma)}}},
                    {"loss", {{"g", sig10(l.g)}, {"f", sig10(l.f)}}}};
    emit(o.output, render(j, o.format));
    return kOk;
  }
  if (!o.r) throw CLI::RequiredError("--r");
  if (*o.r == 1.0) {
    throw DomainError("r = 1 means no content phase; use --loss for the M/M/s/n limits");
  }

  const LimitInputs in{*o.beta, *o.gamma, *o.r};
  json j = {{"inputs",
             {{"beta", sig10(in.beta)}, {"gamma", sig10(in.gamma)}, {"r", sig10(in.r)}, {"mu", sig10(o.mu)}}},
            {"blocking", to_json(limits_blocking(in, o.mu))}};
  if (!o.blocking_only) {
    const HoldingApprox h = holding_approx({in.beta, in.gamma}, in.r, o.mu);
    j["holding"] = {{"g", sig10(h.g)}, {"h", sig10(h.h)}, {"fixed_point", to_json(h.fixed_point)}};
  }
  emit(o.output, render(j, o.format));
  return kOk;
}

// dimension

struct DimensionOpts {
  std::string model = "holding";
  ParamOpts params;
  double target = 0.0;
  std::optional<double> beta_star, gamma_star, beta, gamma, servers, beds;
  std::string format = "json";
  std::string output;
};

int cmd_dimension(const DimensionOpts& o) {
  const ModelParams p = o.params.get();
  const std::pair<const std::optional<double>*, Pin> pins[] = {
      {&o.beta_star, Pin::BetaStar}, {&o.gamma_star, Pin::GammaStar}, {&o.beta, Pin::Beta},
      {&o.gamma, Pin::Gamma},         {&o.servers, Pin::Servers},      {&o.beds, Pin::Beds}};
  std::optional<PinnedCoordinate> pin;
  for (const auto& [opt, which] : pins) {
    if (*opt) pin = PinnedCoordinate{which, **opt};
  }
  if (!pin) throw CLI::RequiredError("one of --beta-star, --gamma-star, --beta, --gamma, --servers, --beds");

  const DimensioningResult d = o.model == "blocking"
                                   ? dimension_blocking(o.target, *pin, derive_loads(p), p.mu)
                                   : dimension_holding(o.target, *pin, p);
  if (d.cap.s > d.cap.n) warn("s > n; at most n servers can be busy");
  json j = to_json(d);
  j["model"] = o.model;
  j["target"] = sig10(o.target);
  emit(o.output, render(j, o.format));
  return kOk;
}

// simulate

struct SimulateOpts {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string output;
  std::string series;
  std::string events;
  std::string schedule;
};

int cmd_simulate(const SimulateOpts& o) {
  const std::filesystem::path file(o.config);
  SimJob job = sim_job_from_json(load_json(file), file.parent_path());
  job.cfg.seed = effective_seed(o.seed, job.cfg.seed);
  if (o.threads) job.cfg.threads = *o.threads;
  if (!o.events.empty()) job.cfg.record_paths = true;

  json j = {{"model", to_string(job.cfg.model)}, {"params", to_json(job.params)}, {"seed", job.cfg.seed}};
  SimResult res;
  if (job.profile) {
    const LoadTrajectory traj = integrate_offered_load(*job.profile, job.params, job.cfg.horizon, job.ode_step);
    const StaffingSchedule sched = mol_schedule(traj, job.staffing_pair, job.staffing_interval);
    if (!o.schedule.empty()) {
      std::ostringstream os;
      write_csv(os, sched);
      emit(o.schedule, os.str());
    }
    res = time_varying_simulate(*job.profile, sched, job.params, job.cfg);
  } else {
    if (job.cap.s > job.cap.n) warn("s > n; at most n servers can be busy");
    j["capacity"] = {{"s", job.cap.s}, {"n", job.cap.n}};
    res = simulate(job.params, job.cap, job.cfg);
  }
  j["result"] = to_json(res);

  if (!o.series.empty()) {
    std::ostringstream os;
    write_time_series_csv(os, res);
    emit(o.series, os.str());
  }
  if (!o.events.empty()) {
    std::ostringstream os;
    write_event_log_csv(os, res);
    emit(o.events, os.str());
  }
  emit(o.output, j.dump(2) + "\n");
  return kOk;
}

// mol

struct MolOpts {
  std::string profile;
  ParamOpts params;
  double beta = 0.0;
  double gamma = 0.0;
  double interval = 0.5;
  std::optional<double> horizon;
  double step = 0.05;
  std::string format = "csv";
  std::string output;
  std::string loads;
};

int cmd_mol(const MolOpts& o) {
  const ArrivalProfile prof = load_profile(o.profile);
  ModelParams p{prof.mean_rate(), o.params.mu, o.params.delta, o.params.p};
  p.validate();
  const double horizon =
      o.horizon ? *o.horizon : prof.period ? *prof.period : prof.breakpoints.back() - prof.breakpoints.front();
  const LoadTrajectory traj = integrate_offered_load(prof, p, horizon, o.step);
  const StaffingSchedule sched = mol_schedule(traj, {o.beta, o.gamma}, o.interval);
  if (!o.loads.empty()) {
    std::ostringstream os;
    write_csv(os, traj);
    emit(o.loads, os.str());
  }
  if (o.format == "json") {
    emit(o.output, to_json(sched).dump(2) + "\n");
  } else {
    std::ostringstream os;
    write_csv(os, sched);
    emit(o.output, os.str());
  }
  return kOk;
}

// tables

struct TablesCmd {
  std::string out_dir;
  TablesOptions opts;
  std::optional<std::uint64_t> seed;
};

int cmd_tables(TablesCmd& o) {
  o.opts.seed = effective_seed(o.seed, o.opts.seed);
  for (const std::string& name : write_tables(o.out_dir, o.opts)) {
    std::cout << (std::filesystem::path(o.out_dir) / name).string() << '\n';
  }
  return kOk;
}

int run_guarded(const std::function<int()>& fn) {
  try {
    return fn();
  } catch (const CLI::Error& e) {
    std::cerr << "error: missing " << e.what() << '\n';
    return kUsage;
  } catch (const NotStable& e) {
    std::cerr << "error: holding model not stable\n"
              << "rho=" << num(e.rho()) << '\n'
              << "rho_max=" << num(e.rho_max()) << '\n';
    return kUnstable;
  } catch (const Infeasible& e) {
    std::cerr << "error: infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const InfeasibleTarget& e) {
    std::cerr << "error: infeasible target: " << e.what() << '\n';
    return kInfeasible;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  } catch (const SingularSystem& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ScheduleGap& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const json::exception& e) {
    std::cerr << "error: config: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Restricted Erlang-R models: exact analysis, QED limits, dimensioning, simulation"};
  app.require_subcommand(1, 1);
  app.failure_message(CLI::FailureMessage::help);
  const auto formats = CLI::IsMember({"json", "csv"});

  AnalyzeOpts an;
  CLI::App* analyze = app.add_subcommand("analyze", "exact stationary analysis of a finite instance");
  analyze->add_option("--model", an.model, "blocking or holding")->check(CLI::IsMember({"blocking", "holding"}));
  add_params(analyze, an.params);
  analyze->add_option("--s", an.s, "servers")->required();
  analyze->add_option("--n", an.n, "beds")->required();
  analyze->add_option("--format", an.format)->check(formats);
  analyze->add_option("-o,--output", an.output, "report file (default stdout)");
  analyze->add_option("--states", an.states, "write the stationary distribution as CSV");
  analyze->add_option("--extra-levels", an.extra_levels, "holding levels above n in --states")->check(CLI::NonNegativeNumber);
  analyze->add_option("--solver", an.solver, "holding boundary solver")->check(CLI::IsMember({"auto", "dense", "level"}));
  analyze->add_option("--g-method", an.g_method, "holding rate-matrix iteration")->check(CLI::IsMember({"functional", "lr"}));
  analyze->add_flag("--time-stationary", an.time_stationary, "blocking delay from the time-stationary law");

  LimitsOpts li;
  CLI::App* limits = app.add_subcommand("limits", "QED limits and the fixed-point holding approximation");
  limits->add_option("--beta", li.beta);
  limits->add_option("--gamma", li.gamma);
  limits->add_option("--r", li.r, "needy-time fraction");
  limits->add_option("--mu", li.mu, "service rate for the wait limit");
  limits->add_flag("--loss", li.loss, "r = 1 loss-delay limits");
  limits->add_flag("--blocking-only", li.blocking_only, "skip the holding approximation");
  limits->add_option("--grid", li.grid, "CSV of beta,gamma,r rows; writes beta,gamma,r,g,f,h");
  limits->add_option("--format", li.format)->check(formats);
  limits->add_option("-o,--output", li.output);

  DimensionOpts di;
  CLI::App* dimension = app.add_subcommand("dimension", "choose s and n for a target delay probability");
  dimension->add_option("--model", di.model)->check(CLI::IsMember({"blocking", "holding"}));
  add_params(dimension, di.params);
  dimension->add_option("--target", di.target, "target delay probability")->required();
  CLI::Option_group* pin = dimension->add_option_group("pin", "the coordinate held fixed");
  pin->add_option("--beta-star", di.beta_star);
  pin->add_option("--gamma-star", di.gamma_star);
  pin->add_option("--beta", di.beta);
  pin->add_option("--gamma", di.gamma);
  pin->add_option("--servers", di.servers);
  pin->add_option("--beds", di.beds);
  pin->require_option(1);
  dimension->add_option("--format", di.format)->check(formats);
  dimension->add_option("-o,--output", di.output);

  SimulateOpts si;
  CLI::App* simulate_cmd = app.add_subcommand("simulate", "discrete-event simulation from a JSON config");
  simulate_cmd->add_option("config", si.config, "config file")->required()->check(CLI::ExistingFile);
  simulate_cmd->add_option("--seed", si.seed, "overrides the config seed; ERLANGR_SEED overrides both");
  simulate_cmd->add_option("--threads", si.threads);
  simulate_cmd->add_option("-o,--output", si.output, "result JSON (default stdout)");
  simulate_cmd->add_option("--series", si.series, "time series CSV t,metric,value");
  simulate_cmd->add_option("--events", si.events, "event log CSV patient_id,event,t");
  simulate_cmd->add_option("--schedule", si.schedule, "staffing schedule CSV (time-varying runs)");

  MolOpts mo;
  CLI::App* mol = app.add_subcommand("mol", "modified-offered-load staffing schedule");
  mol->add_option("--profile", mo.profile, "arrival profile JSON")->required()->check(CLI::ExistingFile);
  add_params(mol, mo.params, false);
  mol->add_option("--beta", mo.beta)->required();
  mol->add_option("--gamma", mo.gamma)->required();
  mol->add_option("--interval", mo.interval)->check(CLI::PositiveNumber);
  mol->add_option("--horizon", mo.horizon, "default: one period")->check(CLI::PositiveNumber);
  mol->add_option("--step", mo.step, "RK4 step")->check(CLI::PositiveNumber);
  mol->add_option("--format", mo.format)->check(formats);
  mol->add_option("-o,--output", mo.output);
  mol->add_option("--loads", mo.loads, "offered-load trajectory CSV t,r1,r2");

  TablesCmd ta;
  CLI::App* tables = app.add_subcommand("tables", "accuracy tables and plot-ready series");
  tables->add_option("--out-dir", ta.out_dir)->required();
  tables->add_option("--r1", ta.opts.r1_values, "needy loads for the accuracy tables");
  tables->add_option("--holding-r1-max", ta.opts.holding_r1_max, "largest R1 solved exactly for holding");
  tables->add_flag("--simulate", ta.opts.simulate, "add the simulated model ordering");
  tables->add_option("--horizon", ta.opts.sim_horizon)->check(CLI::PositiveNumber);
  tables->add_option("--replications", ta.opts.sim_replications)->check(CLI::PositiveNumber);
  tables->add_option("--seed", ta.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (analyze->parsed()) return run_guarded([&] { return cmd_analyze(an); });
  if (limits->parsed()) return run_guarded([&] { return cmd_limits(li); });
  if (dimension->parsed()) return run_guarded([&] { return cmd_dimension(di); });
  if (simulate_cmd->parsed()) return run_guarded([&] { return cmd_simulate(si); });
  if (mol->parsed()) return run_guarded([&] { return cmd_mol(mo); });
  return run_guarded([&] { return cmd_tables(ta); });
}
