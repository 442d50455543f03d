#include "relaycoex/partition.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace relaycoex {

namespace {

constexpr int kMaxValues = 32;
constexpr double kPi = 3.1415926535897932384626433832795;

// Depth-first walk of the two-set assignment tree on descending values.
// Track=true records the best assignment for set reconstruction.
template <bool Track>
struct CgaCore {
  const double* vals;  // descending
  double* suffix;      // suffix[d] = vals[d] + ... + vals[n-1]
  int n;
  double eps;
  bool prune;

  char* assign;       // scratch, per descending position
  char* best_assign;  // only with Track
  double best_diff = std::numeric_limits<double>::infinity();
  bool have_best = false;
  long nodes = 0;
  bool stop = false;
  PartitionTermination term = PartitionTermination::exhausted;

  void record(double diff) {
    if (!have_best || diff < best_diff) {
      have_best = true;
      best_diff = diff;
      if constexpr (Track) {
        for (int i = 0; i < n; ++i) best_assign[i] = assign[i];
      }
    }
  }

  void visit(int d, double sum1, double sum2) {
    ++nodes;
    if (d == n) {
      const double diff = std::abs(sum1 - sum2);
      record(diff);
      if (prune && diff < eps) {
        stop = true;
        term = PartitionTermination::perfect;
      }
      return;
    }
    const double gap = std::abs(sum1 - sum2);
    const double rem = suffix[d];
    if (prune && rem <= gap) {
      // Remaining values cannot bridge the gap: the forced completion that
      // dumps them all into the lower-sum set is exactly optimal here.
      const char lighter = (sum1 <= sum2) ? 1 : 2;
      if constexpr (Track) {
        for (int i = d; i < n; ++i) assign[i] = lighter;
      }
      const double diff = gap - rem;
      record(diff);
      if (diff < eps) {
        stop = true;
        term = PartitionTermination::prune_condition_2;
      }
      return;
    }
    const char first = (sum1 <= sum2) ? 1 : 2;
    auto descend = [&](char set) {
      if constexpr (Track) assign[d] = set;
      if (set == 1) {
        visit(d + 1, sum1 + vals[d], sum2);
      } else {
        visit(d + 1, sum1, sum2 + vals[d]);
      }
    };
    if (d == n - 1) {
      // The last value always goes to the lower-sum set.
      descend(first);
      return;
    }
    if (prune && sum1 == sum2) {
      // Equal sums: both branches are mirror images, one suffices.
      descend(1);
      return;
    }
    descend(first);
    if (stop) return;
    descend(first == 1 ? 2 : 1);
  }
};

void sort_descending(const std::vector<double>& values, std::vector<int>& order,
                     std::vector<double>& sorted) {
  const int n = static_cast<int>(values.size());
  order.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&values](int a, int b) { return values[static_cast<size_t>(a)] > values[static_cast<size_t>(b)]; });
  sorted.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) sorted[static_cast<size_t>(i)] = values[static_cast<size_t>(order[static_cast<size_t>(i)])];
}

void check_instance(const PartitionInstance& inst) {
  if (inst.values.empty()) throw std::invalid_argument("partition: no values");
  if (inst.epsilon < 0.0) throw std::invalid_argument("partition: epsilon must be >= 0");
  for (double v : inst.values) {
    if (!(v >= 0.0)) throw std::invalid_argument("partition: values must be >= 0");
  }
}

// Sum per set in ascending position order, so the reported difference is
// reproducible from the sets alone, identically across all three solvers.
double canonical_difference(const PartitionInstance& inst, const std::vector<int>& set1,
                            const std::vector<int>& set2) {
  double s1 = 0.0;
  double s2 = 0.0;
  for (int i : set1) s1 += inst.values[static_cast<size_t>(i)];
  for (int i : set2) s2 += inst.values[static_cast<size_t>(i)];
  return std::abs(s1 - s2);
}

// Positions ascending per set; position 0 canonically lives in set1.
void finish_solution(const PartitionInstance& inst, PartitionSolution& sol) {
  std::sort(sol.set1.begin(), sol.set1.end());
  std::sort(sol.set2.begin(), sol.set2.end());
  if (std::find(sol.set2.begin(), sol.set2.end(), 0) != sol.set2.end()) {
    std::swap(sol.set1, sol.set2);
  }
  sol.difference = canonical_difference(inst, sol.set1, sol.set2);
}

}  // namespace

PartitionSolution solve_cga(const PartitionInstance& inst, const CgaOptions& opts) {
  check_instance(inst);
  const int n = static_cast<int>(inst.values.size());

  std::vector<int> order;
  std::vector<double> sorted;
  sort_descending(inst.values, order, sorted);
  std::vector<double> suffix(static_cast<size_t>(n) + 1, 0.0);
  for (int d = n - 1; d >= 0; --d) {
    suffix[static_cast<size_t>(d)] = suffix[static_cast<size_t>(d) + 1] + sorted[static_cast<size_t>(d)];
  }
  std::vector<char> assign(static_cast<size_t>(n), 0);
  std::vector<char> best(static_cast<size_t>(n), 0);

  CgaCore<true> core;
  core.vals = sorted.data();
  core.suffix = suffix.data();
  core.n = n;
  core.eps = inst.epsilon;
  core.prune = opts.use_pruning;
  core.assign = assign.data();
  core.best_assign = best.data();
  core.visit(0, 0.0, 0.0);

  PartitionSolution sol;
  sol.nodes_explored = core.nodes;
  sol.terminated_by = core.term;
  for (int i = 0; i < n; ++i) {
    (best[static_cast<size_t>(i)] == 1 ? sol.set1 : sol.set2).push_back(order[static_cast<size_t>(i)]);
  }
  finish_solution(inst, sol);
  return sol;
}

double cga_min_difference(const double* values, int n, double epsilon) {
  if (n < 1 || n > kMaxValues) {
    throw std::invalid_argument("cga_min_difference: need 1..32 values");
  }
  std::array<int, kMaxValues> order;
  for (int i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
  std::sort(order.begin(), order.begin() + n, [values](int a, int b) {
    return values[a] > values[b] || (values[a] == values[b] && a < b);
  });
  std::array<double, kMaxValues> sorted;
  std::array<int, kMaxValues> slot_of;
  for (int i = 0; i < n; ++i) {
    sorted[static_cast<size_t>(i)] = values[order[static_cast<size_t>(i)]];
    slot_of[static_cast<size_t>(order[static_cast<size_t>(i)])] = i;
  }
  std::array<double, kMaxValues + 1> suffix;
  suffix[static_cast<size_t>(n)] = 0.0;
  for (int d = n - 1; d >= 0; --d) {
    suffix[static_cast<size_t>(d)] = suffix[static_cast<size_t>(d) + 1] + sorted[static_cast<size_t>(d)];
  }
  std::array<char, kMaxValues> assign{};
  std::array<char, kMaxValues> best{};
  CgaCore<true> core;
  core.vals = sorted.data();
  core.suffix = suffix.data();
  core.n = n;
  core.eps = epsilon;
  core.prune = true;
  core.assign = assign.data();
  core.best_assign = best.data();
  core.visit(0, 0.0, 0.0);
  // Recompute from the winning sets in original position order, so the value
  // matches the set-building solvers bit for bit.
  double s1 = 0.0;
  double s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    (best[static_cast<size_t>(slot_of[static_cast<size_t>(i)])] == 1 ? s1 : s2) +=
        values[i];
  }
  return std::abs(s1 - s2);
}

PartitionSolution solve_greedy(const PartitionInstance& inst) {
  check_instance(inst);
  std::vector<int> order;
  std::vector<double> sorted;
  sort_descending(inst.values, order, sorted);

  PartitionSolution sol;
  double s1 = 0.0;
  double s2 = 0.0;
  for (size_t i = 0; i < sorted.size(); ++i) {
    if (s1 <= s2) {
      sol.set1.push_back(order[i]);
      s1 += sorted[i];
    } else {
      sol.set2.push_back(order[i]);
      s2 += sorted[i];
    }
  }
  sol.nodes_explored = static_cast<long>(sorted.size());
  sol.terminated_by = PartitionTermination::exhausted;
  finish_solution(inst, sol);
  return sol;
}

PartitionSolution solve_bruteforce(const PartitionInstance& inst) {
  check_instance(inst);
  const int n = static_cast<int>(inst.values.size());
  if (n > 24) throw std::invalid_argument("solve_bruteforce: more than 24 values");

  const std::uint32_t patterns = 1u << (n - 1);
  double best_diff = std::numeric_limits<double>::infinity();
  std::uint32_t best_mask = 0;
  for (std::uint32_t mask = 0; mask < patterns; ++mask) {
    // Bit i-1 sends position i to set2; position 0 stays in set1.
    double s1 = inst.values[0];
    double s2 = 0.0;
    for (int i = 1; i < n; ++i) {
      if (mask & (1u << (i - 1))) {
        s2 += inst.values[static_cast<size_t>(i)];
      } else {
        s1 += inst.values[static_cast<size_t>(i)];
      }
    }
    const double diff = std::abs(s1 - s2);
    if (diff < best_diff) {
      best_diff = diff;
      best_mask = mask;
    }
  }

  PartitionSolution sol;
  sol.set1.push_back(0);
  for (int i = 1; i < n; ++i) {
    if (best_mask & (1u << (i - 1))) {
      sol.set2.push_back(i);
    } else {
      sol.set1.push_back(i);
    }
  }
  sol.nodes_explored = static_cast<long>(patterns);
  sol.terminated_by = PartitionTermination::exhausted;
  finish_solution(inst, sol);
  return sol;
}

PartitionInstance make_partition_instance(const CoherentTerms& terms, double epsilon_scale) {
  PartitionInstance inst;
  inst.values.push_back(terms.a_mag);
  double total = terms.a_mag;
  for (int k : terms.subset.indices) {
    const double m = terms.b_mag.at(k);
    inst.values.push_back(m);
    total += m;
  }
  inst.epsilon = epsilon_scale * total;
  return inst;
}

namespace {

void check_solution_covers(const PartitionSolution& sol, const CoherentTerms& terms) {
  const size_t n = terms.subset.indices.size() + 1;
  std::vector<char> seen(n, 0);
  auto mark = [&](const std::vector<int>& set) {
    for (int i : set) {
      if (i < 0 || static_cast<size_t>(i) >= n || seen[static_cast<size_t>(i)]) {
        throw std::invalid_argument("partition solution does not match terms");
      }
      seen[static_cast<size_t>(i)] = 1;
    }
  };
  mark(sol.set1);
  mark(sol.set2);
  if (sol.set1.size() + sol.set2.size() != n) {
    throw std::invalid_argument("partition solution does not match terms");
  }
  if (std::find(sol.set1.begin(), sol.set1.end(), 0) == sol.set1.end()) {
    throw std::invalid_argument("partition solution must keep position 0 in set1");
  }
}

}  // namespace

PhaseAssignment partition_to_phases(const PartitionSolution& sol,
                                    const CoherentTerms& terms) {
  check_solution_covers(sol, terms);
  PhaseAssignment out;
  for (int p : sol.set1) {
    if (p == 0) continue;
    const int k = terms.subset.indices[static_cast<size_t>(p - 1)];
    out.phi[k] = wrap_phase(terms.b_phase.at(k) - terms.a_phase);
  }
  for (int p : sol.set2) {
    const int k = terms.subset.indices[static_cast<size_t>(p - 1)];
    out.phi[k] = wrap_phase(terms.b_phase.at(k) - terms.a_phase + kPi);
  }
  return out;
}

PhasePartition to_phase_partition(const PartitionSolution& sol,
                                  const CoherentTerms& terms) {
  check_solution_covers(sol, terms);
  PhasePartition part;
  double d = terms.a_mag;
  for (int p : sol.set1) {
    if (p == 0) continue;
    const int k = terms.subset.indices[static_cast<size_t>(p - 1)];
    part.in_phase.push_back(k);
    d += terms.b_mag.at(k);
  }
  for (int p : sol.set2) {
    const int k = terms.subset.indices[static_cast<size_t>(p - 1)];
    part.anti_phase.push_back(k);
    d -= terms.b_mag.at(k);
  }
  part.residual = d;
  part.interference = d * d;
  return part;
}

}  // namespace relaycoex
