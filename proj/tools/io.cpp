#include "io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "erlangr/errors.hpp"

namespace erlangr::cli {

double sig10(double x) {
  if (!std::isfinite(x)) return x;
  return std::strtod(num(x).c_str(), nullptr);
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

json to_json(const ModelParams& p) {
  return {{"lambda", sig10(p.lambda)}, {"mu", sig10(p.mu)}, {"delta", sig10(p.delta)}, {"p", sig10(p.p)}};
}

json to_json(const DerivedLoads& l) {
  json j = {{"r1", sig10(l.r1)}, {"r2", sig10(l.r2)}, {"r", sig10(l.r)}};
  if (l.rho) j["rho"] = sig10(*l.rho);
  return j;
}

json to_json(const PerformanceReport& r) {
  return {{"p_delay", sig10(r.p_delay)},
          {"p_boundary", sig10(r.p_boundary)},
          {"e_wait", sig10(r.e_wait)},
          {"e_holding_queue", sig10(r.e_holding_queue)},
          {"rho_s", sig10(r.rho_s)},
          {"rho_n", sig10(r.rho_n)},
          {"p_delay_request", sig10(r.p_delay_request)},
          {"e_wait_request", sig10(r.e_wait_request)}};
}

json to_json(const Estimate& e) { return {{"mean", sig10(e.mean)}, {"half_width", sig10(e.half_width)}}; }

json to_json(const BlockingLimits& l) { return {{"g", sig10(l.g)}, {"f", sig10(l.f)}, {"h", sig10(l.h)}}; }

json to_json(const FixedPointSolution& fp) {
  return {{"alpha", sig10(fp.alpha)},
          {"effective_beta", sig10(fp.effective_beta)},
          {"effective_gamma", sig10(fp.effective_gamma)},
          {"iterations", fp.iterations},
          {"residual", sig10(fp.residual)},
          {"bisection_alpha", sig10(fp.bisection_alpha)},
          {"roots_agree", fp.roots_agree}};
}

json to_json(const DimensioningResult& d) {
  // Re-admission correction of the server hedge; zero for blocking.
  const double alpha = d.pair.beta - d.star_pair.beta;
  json j = {{"beta_star", sig10(d.star_pair.beta)},
            {"gamma_star", sig10(d.star_pair.gamma)},
            {"alpha", sig10(alpha)},
            {"beta", sig10(d.pair.beta)},
            {"gamma", sig10(d.pair.gamma)},
            {"s", d.cap.s},
            {"n", d.cap.n},
            {"predicted", to_json(d.predicted)}};
  if (d.fixed_point) j["fixed_point"] = to_json(*d.fixed_point);
  return j;
}

namespace {

json tail_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(sig10(x));
  return a;
}

}  // namespace

json to_json(const SimResult& r) {
  json j = {{"p_delay", to_json(r.p_delay)},
            {"p_delay_request", to_json(r.p_delay_request)},
            {"p_boundary", to_json(r.p_boundary)},
            {"e_wait", to_json(r.e_wait)},
            {"e_holding_queue", to_json(r.e_holding_queue)},
            {"e_holding_wait", to_json(r.e_holding_wait)},
            {"rho_s", to_json(r.rho_s)},
            {"rho_n", to_json(r.rho_n)},
            {"e_needy_queue", to_json(r.e_needy_queue)},
            {"request_rate", to_json(r.request_rate)},
            {"mean_census", to_json(r.mean_census)},
            {"census_tail", tail_json(r.census_tail)},
            {"needy_tail", tail_json(r.needy_tail)},
            {"replications", r.replications},
            {"ci_method", r.ci_method}};
  j["flow"] = {{"arrivals", r.flow.arrivals},       {"admitted", r.flow.admitted},
               {"departed", r.flow.departed},       {"blocked", r.flow.blocked},
               {"held", r.flow.held},               {"in_system_end", r.flow.in_system_end},
               {"holding_end", r.flow.holding_end}};
  j["visit_counts"] = r.visit_counts;
  json strata = json::array();
  for (const auto& st : r.visit_strata) {
    strata.push_back({{"visits", st.visits},
                      {"patients", st.patients},
                      {"pre_entrant_wait", to_json(st.pre_entrant_wait)},
                      {"needy_wait", to_json(st.needy_wait)},
                      {"total_wait", to_json(st.total_wait)}});
  }
  j["visit_strata"] = strata;
  return j;
}

json to_json(const StaffingSchedule& s) {
  json rows = json::array();
  for (std::size_t k = 0; k < s.s.size(); ++k) {
    rows.push_back({{"t_start", sig10(s.interval * k)},
                    {"t_end", sig10(s.interval * (k + 1))},
                    {"s", s.s[k]},
                    {"n", s.n[k]}});
  }
  return {{"interval", sig10(s.interval)},
          {"beta", sig10(s.pair.beta)},
          {"gamma", sig10(s.pair.gamma)},
          {"intervals", rows}};
}

namespace {

void flatten(std::ostream& os, const json& j, const std::string& prefix) {
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) flatten(os, value, prefix.empty() ? key : prefix + "." + key);
  } else if (j.is_array()) {
    for (std::size_t k = 0; k < j.size(); ++k) flatten(os, j[k], prefix + "." + std::to_string(k));
  } else if (j.is_number_float()) {
    os << prefix << ',' << num(j.get<double>()) << '\n';
  } else if (j.is_number()) {
    os << prefix << ',' << j.dump() << '\n';
  } else if (j.is_boolean()) {
    os << prefix << ',' << (j.get<bool>() ? 1 : 0) << '\n';
  } else if (j.is_string()) {
    os << prefix << ',' << j.get<std::string>() << '\n';
  }
}

double number_at(const json& j, const char* key) {
  if (!j.contains(key)) throw DomainError(std::string("missing field '") + key + "'");
  if (!j.at(key).is_number()) throw DomainError(std::string("field '") + key + "' must be a number");
  return j.at(key).get<double>();
}

template <class T>
T value_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

void write_flat_csv(std::ostream& os, const json& j) {
  os << "metric,value\n";
  flatten(os, j, "");
}

ModelParams params_from_json(const json& j) {
  ModelParams p{number_at(j, "lambda"), number_at(j, "mu"), number_at(j, "delta"), number_at(j, "p")};
  p.validate();
  return p;
}

ArrivalProfile profile_from_json(const json& j) {
  ArrivalProfile prof;
  prof.breakpoints = j.at("breakpoints").get<std::vector<double>>();
  prof.rates = j.at("rates").get<std::vector<double>>();
  if (j.contains("period") && !j.at("period").is_null()) prof.period = j.at("period").get<double>();
  prof.validate();
  return prof;
}

json load_json(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw DomainError("cannot open " + file.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DomainError(file.string() + ": " + e.what());
  }
}

ArrivalProfile load_profile(const std::filesystem::path& file) { return profile_from_json(load_json(file)); }

SimJob sim_job_from_json(const json& j, const std::filesystem::path& base) {
  SimJob job;
  job.cfg.model = sim_model_from_string(value_or<std::string>(j, "model", "holding"));

  if (j.contains("time_varying")) {
    const json& tv = j.at("time_varying");
    const json& prof = tv.at("profile");
    job.profile = prof.is_string() ? load_profile(base / prof.get<std::string>()) : profile_from_json(prof);
    json params = j.at("params");
    if (!params.contains("lambda")) params["lambda"] = job.profile->mean_rate();
    job.params = params_from_json(params);
    job.staffing_pair = {number_at(tv, "beta"), number_at(tv, "gamma")};
    job.staffing_interval = value_or(tv, "interval", 0.5);
    job.ode_step = value_or(tv, "step", 0.05);
  } else {
    job.params = params_from_json(j.at("params"));
    if (j.contains("capacity")) {
      job.cap = {j.at("capacity").at("s").get<int>(), j.at("capacity").at("n").get<int>()};
    } else if (j.contains("qed")) {
      const json& q = j.at("qed");
      const std::string rounding = value_or<std::string>(q, "rounding", "floor");
      if (rounding != "floor" && rounding != "nearest") throw DomainError("rounding must be floor or nearest");
      const DerivedLoads l = derive_loads(job.params);
      job.cap = qed_capacity(l.r1, l.r, {number_at(q, "beta"), number_at(q, "gamma")},
                             rounding == "floor" ? BedRounding::Floor : BedRounding::Nearest);
    } else {
      throw DomainError("config needs 'capacity' or 'qed'");
    }
    validate(job.cap);
  }

  const json sim = value_or(j, "simulation", json::object());
  SimConfig& c = job.cfg;
  c.horizon = value_or(sim, "horizon", c.horizon);
  if (sim.contains("warmup")) c.warmup = sim.at("warmup").get<double>();
  c.replications = value_or(sim, "replications", c.replications);
  c.seed = value_or(sim, "seed", c.seed);
  c.threads = value_or(sim, "threads", c.threads);
  c.batches = value_or(sim, "batches", c.batches);
  c.bin_width = value_or(sim, "bin_width", c.bin_width);
  if (sim.contains("fold_period")) c.fold_period = sim.at("fold_period").get<double>();
  c.record_paths = value_or(sim, "record_paths", c.record_paths);
  c.max_logged_events = value_or(sim, "max_logged_events", c.max_logged_events);
  return job;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write " + path);
  out << text;
}

}  // namespace erlangr::cli
