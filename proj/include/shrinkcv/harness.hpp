// Seeded Monte-Carlo execution over (method, L) grids with deterministic
// aggregation, plus CSV emission.
#pragma once

#include "shrinkcv/config.hpp"
#include "shrinkcv/tuning.hpp"

#include <string>
#include <vector>

namespace shrinkcv {

struct SweepRow {
  std::string method;
  int l_count = 0;
  double mean_sl_db = 0.0;
  double std_sl_db = 0.0;
  double mean_nmse = 0.0;
  double mean_rho = 0.0;
  double mean_iterations = 0.0;
  int trials_failed = 0;
};

struct SweepReport {
  std::vector<SweepRow> rows;  // sorted by (method, L)
};

// One diagnostic series (distance / rho per iteration, or the cost curve).
struct CurveSeries {
  std::string series;  // "<kind>:<method>:L=<L>"
  int trial = 0;
  std::vector<double> values;
};

struct SweepOutcome {
  SweepReport report;
  std::vector<CurveSeries> curves;
};

// Runs config.trials trials per L; every method inside a trial consumes the
// identical snapshot set.  Results are bit-reproducible for a fixed
// (config, master_seed) regardless of the worker count.
SweepOutcome run_sweep(const ExperimentConfig& config, int threads = 0);

// Header: method,L,mean_sl_db,std_sl_db,mean_nmse,mean_rho,mean_iterations,trials_failed
void emit_csv(const SweepReport& report, const std::string& path);
std::string csv_to_string(const SweepReport& report);

// Long format: series,trial,index,value
void emit_curves(const std::vector<CurveSeries>& curves, const std::string& path);
std::string curves_to_string(const std::vector<CurveSeries>& curves);

}  // namespace shrinkcv
