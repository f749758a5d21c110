#pragma once

#include <filesystem>
#include <iosfwd>
#include <json.hpp>
#include <string>

#include "erlangr/dimensioning.hpp"
#include "erlangr/mol.hpp"
#include "erlangr/qed_limits.hpp"
#include "erlangr/simulator.hpp"

namespace erlangr::cli {

using nlohmann::json;

/// Rounds to 10 significant digits so the printed form is stable.
double sig10(double x);

/// Formats with 10 significant digits in the C locale.
std::string num(double x);

json to_json(const ModelParams& p);
json to_json(const DerivedLoads& l);
json to_json(const PerformanceReport& r);
json to_json(const Estimate& e);
json to_json(const BlockingLimits& l);
json to_json(const FixedPointSolution& fp);
json to_json(const DimensioningResult& d);
json to_json(const SimResult& r);
json to_json(const StaffingSchedule& s);

/// `metric,value` rows for every numeric leaf, nested keys joined by dots.
void write_flat_csv(std::ostream& os, const json& j);

ModelParams params_from_json(const json& j);
ArrivalProfile profile_from_json(const json& j);
ArrivalProfile load_profile(const std::filesystem::path& file);
json load_json(const std::filesystem::path& file);

/// Everything a `simulate` config file describes.
struct SimJob {
  ModelParams params;
  CapacityPair cap;
  SimConfig cfg;
  std::optional<ArrivalProfile> profile;  ///< set for time-varying runs
  QedPair staffing_pair;
  double staffing_interval = 0.5;
  double ode_step = 0.05;
};

/// Relative paths inside the config resolve against `base`.
SimJob sim_job_from_json(const json& j, const std::filesystem::path& base);

/// Writes to `path`, or to stdout when it is empty or "-".
void emit(const std::string& path, const std::string& text);

}  // namespace erlangr::cli
