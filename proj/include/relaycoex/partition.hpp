#pragma once

#include <vector>

#include "relaycoex/interference.hpp"

namespace relaycoex {

// Two-way number partitioning instance. Positions index `values`; when built
// from coherent terms, position 0 is the direct-term magnitude and positions
// 1..n follow the relay subset order. epsilon is the good-enough difference
// threshold for early termination.
struct PartitionInstance {
  std::vector<double> values;
  double epsilon = 0.0;
};

enum class PartitionTermination {
  perfect,            // a leaf difference below epsilon stopped the search
  prune_condition_2,  // a closed subtree's forced completion was below epsilon
  exhausted,          // the whole tree was searched
};

struct PartitionSolution {
  std::vector<int> set1;  // position indices, ascending; position 0 lives here
  std::vector<int> set2;
  double difference = 0.0;
  long nodes_explored = 0;
  PartitionTermination terminated_by = PartitionTermination::exhausted;
};

struct CgaOptions {
  // Disabling the stop/prune conditions turns the search into a plain
  // exhaustive walk; the returned difference must not change.
  bool use_pruning = true;
};

// Complete greedy search over the two-set assignment tree. Values are taken
// in descending order; each node tries the lower-sum set first, the final
// value always goes to the lower-sum set. With pruning on: a leaf difference
// below epsilon stops the search; a node whose remaining values cannot
// bridge the current gap is closed with the forced completion (exact there);
// an equal-sums node explores only one branch.
PartitionSolution solve_cga(const PartitionInstance& inst, const CgaOptions& opts = {});

// Minimum achievable difference only, no set reconstruction and no heap
// allocation; early-stops once a completion below epsilon is found. Shares
// the tree walk with solve_cga. Guarded to 32 values. Meant for grid-search
// hot paths that only need a feasibility answer.
double cga_min_difference(const double* values, int n, double epsilon);

// One-pass greedy: descending values, each to the lower-sum set (ties to
// set1).
PartitionSolution solve_greedy(const PartitionInstance& inst);

// Exact minimum over all sign patterns with position 0 fixed in set1.
// Guarded to 24 values.
PartitionSolution solve_bruteforce(const PartitionInstance& inst);

// Instance [ |A|, |B_k| ... ] in subset order. epsilon defaults to
// epsilon_scale times the value sum.
PartitionInstance make_partition_instance(const CoherentTerms& terms,
                                          double epsilon_scale = 1e-9);

// Maps a solution back to relay phase offsets: set1 members align with the
// direct phasor (phi = phase(B_k) - phase(A)), set2 members oppose it
// (pi added), both wrapped to [0, 2*pi). Requires position 0 in set1.
PhaseAssignment partition_to_phases(const PartitionSolution& sol,
                                    const CoherentTerms& terms);

// The same split as a PhasePartition with residual and interference filled
// from the term magnitudes. Requires position 0 in set1.
PhasePartition to_phase_partition(const PartitionSolution& sol,
                                  const CoherentTerms& terms);

}  // namespace relaycoex
