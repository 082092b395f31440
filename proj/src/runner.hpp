#pragma once

#include "csv.hpp"
#include "presets.hpp"

namespace degenid::app {

// CSV builders are exposed separately from the file writers so the acceptance
// checks can compare repeated runs byte for byte in memory.
CsvTable table_csv(const std::vector<NoiseSweepRow<double>>& rows,
                   const std::vector<std::string>& param_names);
CsvTable history_csv(const InversionResult<double>& res,
                     const std::vector<std::string>& param_names);

struct ExperimentReport {
  std::string name;
  std::string out_dir;
  std::vector<std::string> param_names;
  Vector<double> params;
  Vector<double> truth;
  double cost = 0.0;
  int iterations = 0;
  std::string termination;
  bool low_sensitivity_warning = false;
  double max_param_error = 0.0;  // inf-norm distance to truth, noiseless run
  bool has_tol = false;
  bool pass = true;  // tolerance check on the noiseless run, when the config has one
  double wall_seconds = 0.0;
};

// Full artifact set for one config: table.csv (noise rows), history.csv,
// plots/*.svg, summary.json, and the resolved config for re-runs.
ExperimentReport run_experiment(const Config& cfg, const std::string& out_dir);

// Forward solve only: solution profiles, a dissipativity line, a plot.
struct ForwardReport {
  std::string out_dir;
  bool checked_dissipativity = false;
  bool dissipative = true;
  double max_growth = 0.0;
};
ForwardReport run_forward(const Config& cfg, const std::string& out_dir);

struct SuiteEntry {
  std::string name;
  bool ok = false;       // ran to completion
  std::string error;     // exception text when !ok
  ExperimentReport report;
};

struct SuiteReport {
  std::vector<SuiteEntry> entries;
  bool all_pass = true;
};

// Sequential by default; jobs > 1 runs independent configs on worker threads,
// each writing to its own subdirectory of out_root. Failures are recorded and
// the remaining configs still run.
SuiteReport run_suite(const std::vector<Config>& configs, const std::string& out_root,
                      int jobs = 1);

}  // namespace degenid::app
