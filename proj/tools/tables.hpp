#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace erlangr::cli {

struct TablesOptions {
  std::vector<double> r1_values{5, 10, 25, 50, 100, 250};
  double holding_r1_max = 25.0;  ///< larger loads make the QBD column slow
  bool simulate = false;         ///< include the simulated ordering table
  double sim_horizon = 2000.0;
  int sim_replications = 5;
  std::uint64_t seed = 1;
};

/// Writes the accuracy tables and plot-ready series into `dir`; returns the file names.
std::vector<std::string> write_tables(const std::filesystem::path& dir, const TablesOptions& opts);

}  // namespace erlangr::cli
