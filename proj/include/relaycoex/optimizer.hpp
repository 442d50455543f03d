#pragma once

#include <optional>
#include <string>
#include <vector>

#include "relaycoex/partition.hpp"
#include "relaycoex/rate.hpp"

namespace relaycoex {

// Interference model the constraint is enforced against. Non-coherent
// treats forwarding phases as averaged out; coherent tunes them so the
// radar-side phasors cancel in two opposed groups.
enum class Mode { noncoherent, coherent };

// greedy1: cyclic single-coordinate ascent. greedy2: source update plus
// pairwise joint relay updates. grid_oracle: exhaustive grid reference.
enum class Schedule { greedy1, greedy2, grid_oracle };

struct SolverOptions {
  Mode mode = Mode::noncoherent;
  Schedule schedule = Schedule::greedy1;
  int block_size = 1;        // relay powers updated jointly per step
  double scalar_tol = 1e-6;  // 1-D search tolerance, relative
  double outer_tol = 1e-7;   // outer loop stop on objective change
  int max_outer_iters = 200;
  int grid_points = 41;      // grid_oracle points per dimension
  bool oracle_refine = true; // polish the oracle's best grid point once
  std::optional<PowerAllocation> initial_allocation;  // multi-start hook

  static SolverOptions make(Mode mode, Schedule schedule);
  void validate() const;
};

struct SolveResult {
  RelaySubset subset;
  PowerAllocation allocation;
  std::optional<PhasePartition> partition;  // coherent mode only
  double rate = 0.0;             // exact end-to-end rate at `allocation`
  double objective_value = 0.0;  // maximized objective on the rate scale;
                                 // agrees with `rate` up to evaluation order
  double interference = 0.0;     // achieved at the radar under `mode`
  int iterations = 0;
  std::vector<double> objective_trace;  // one entry per outer iteration,
                                        // preceded by the starting value
};

// One scalar decision variable: the source power or one relay's power.
struct VariableId {
  bool is_source = true;
  int relay = 0;  // 1-based, meaningful when !is_source

  static VariableId source() { return VariableId{true, 0}; }
  static VariableId relay_power(int k) { return VariableId{false, k}; }
};

struct FeasibleInterval {
  double lo = 0.0;
  double hi = 0.0;
};

// Largest closed interval of values for `var` that keeps the mode's radar
// constraint satisfied with every other power held fixed, intersected with
// the variable's box. Non-coherent inverts the affine constraint in closed
// form. Coherent evaluates the partition-form interference (for `partition`,
// or the best split at the current point when absent) on a 512-point scan
// and bisects the bracketing sign changes, returning the component that
// contains the current value. Throws std::runtime_error when no value of
// `var` is feasible, or the current point itself violates the constraint.
FeasibleInterval feasible_interval(Mode mode, const ChannelRealization& ch,
                                   const ScenarioConfig& cfg, const RelaySubset& subset,
                                   const PowerAllocation& alloc, VariableId var,
                                   const std::optional<PhasePartition>& partition =
                                       std::nullopt);

// Block-coordinate ascent on the rate objective under the mode's
// interference constraint. Runs a small set of deterministic starts (capped
// allocation scaled to feasibility, two budget-lean mixes, and a coarse grid
// seed when the dimension guard allows) and keeps the best; in coherent mode
// each outer iteration first re-solves the phase split at the current powers,
// then updates powers in square-root variables. Every accepted move strictly
// improves the objective, so the trace is nondecreasing and the final point
// feasible.
SolveResult solve_coordinate_ascent(const ChannelRealization& ch, const ScenarioConfig& cfg,
                                    const RelaySubset& subset, const SolverOptions& opts);

// Exhaustive reference: a uniform grid per power dimension, keeping feasible
// points only (coherent feasibility solves the phase split at every tested
// point) and maximizing the exact rate; ties prefer lower total power. With
// oracle_refine the best grid point gets one coordinate-ascent polish pass.
// Guarded to |subset| + 1 <= 5 dimensions.
SolveResult solve_grid_oracle(const ChannelRealization& ch, const ScenarioConfig& cfg,
                              const RelaySubset& subset, const SolverOptions& opts);

// Dispatch on opts.schedule.
SolveResult solve(const ChannelRealization& ch, const ScenarioConfig& cfg,
                  const RelaySubset& subset, const SolverOptions& opts);

const char* to_string(Mode mode);
const char* to_string(Schedule schedule);
Mode mode_from_string(const std::string& s);
Schedule schedule_from_string(const std::string& s);

}  // namespace relaycoex
