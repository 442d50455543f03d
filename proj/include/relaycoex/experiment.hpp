#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "relaycoex/selection.hpp"

namespace relaycoex {

// One algorithm column of a sweep: solver mode and schedule plus the relay
// selection policy it runs under.
struct AlgorithmSpec {
  Mode mode = Mode::noncoherent;
  Schedule schedule = Schedule::greedy1;
  SelectionPolicy selection = SelectionPolicy::full;
};

// A Monte Carlo sweep of one scenario parameter. Each trial draws one
// channel realization from `base` (the swept parameter does not perturb the
// draws), shared across all swept values and algorithms, so curves are
// paired sample by sample.
struct SweepSpec {
  ScenarioConfig base = ScenarioConfig::defaults(2);
  std::string parameter = "i_bar_db";
  std::vector<double> values;
  int trials = 200;
  std::uint64_t seed = 1;
  std::vector<AlgorithmSpec> algorithms;
  SolverOptions base_options = SolverOptions::make(Mode::noncoherent, Schedule::greedy1);
  bool measure_time = true;   // false pins mean_solve_ms to 0 for reproducible output
  bool keep_results = false;  // retain every SolveResult in the outcome
};

// Copy of `base` with one named parameter replaced. Supported names:
// i_bar, i_bar_db, p_max, p_max_db (source and relay caps together),
// p_s_max, p_s_max_db, p_r_max, p_r_max_db, zeta.
ScenarioConfig apply_parameter(const ScenarioConfig& base, const std::string& name,
                               double value);

struct SweepRow {
  std::string swept_name;
  double swept_value = 0.0;
  Mode mode = Mode::noncoherent;
  Schedule schedule = Schedule::greedy1;
  SelectionPolicy selection = SelectionPolicy::full;
  double mean_rate = 0.0;            // bits/s/Hz over kept trials
  double stderr_rate = 0.0;          // sample standard error, 0 when < 2 trials
  std::optional<double> gap_pct;     // vs the same-mode oracle column, if present
  double mean_solve_ms = 0.0;
  int trials_used = 0;
};

struct TrialRecord {
  int value_index = 0;
  int trial = 0;
  int algorithm_index = 0;
  SolveResult result;
  double solve_ms = 0.0;
};

struct SweepOutcome {
  std::vector<SweepRow> rows;        // values in input order, algorithms per value
  std::vector<TrialRecord> results;  // populated when keep_results is set
  std::vector<std::string> errors;   // one entry per dropped trial
};

// Runs all (value, trial) cells, in parallel when more than one thread is
// available (RELAYCOEX_THREADS overrides the thread count). A solver error
// drops the whole trial for that value, across all algorithms, so means stay
// paired.
SweepOutcome run_sweep(const SweepSpec& spec);

// CSV with a fixed header:
// swept_name,swept_value,mode,schedule,selection,mean_rate_bps_hz,stderr,gap_pct,mean_solve_ms
// Numbers use %.17g; an absent gap is an empty field.
std::string emit_csv(const std::vector<SweepRow>& rows);

// Fixed-width text table of the same rows.
std::string emit_table(const std::vector<SweepRow>& rows);

// Full sweep description: scenario fields at the top level plus a "sweep"
// object (parameter, values, trials, seed, algorithms, grid_points,
// oracle_refine, measure_time).
SweepSpec sweep_spec_from_json(const std::string& text);

}  // namespace relaycoex
