#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "relaycoex/experiment.hpp"
#include "relaycoex/interference.hpp"
#include "relaycoex/partition.hpp"

namespace {

using nlohmann::json;
using namespace relaycoex;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << text;
}

const char* termination_name(PartitionTermination t) {
  switch (t) {
    case PartitionTermination::perfect: return "perfect";
    case PartitionTermination::prune_condition_2: return "pruned";
    default: return "exhausted";
  }
}

json result_to_json(const SolveResult& res, const ChannelRealization& ch,
                    const ScenarioConfig& cfg, const SolverOptions& opts) {
  json j;
  j["mode"] = to_string(opts.mode);
  j["schedule"] = to_string(opts.schedule);
  j["subset"] = res.subset.indices;
  j["p_s"] = res.allocation.p_s;
  json pr = json::object();
  for (const auto& [k, p] : res.allocation.p_r) pr[std::to_string(k)] = p;
  j["p_r"] = pr;
  j["rate_bps_hz"] = res.rate;
  j["objective_value"] = res.objective_value;
  j["interference"] = res.interference;
  j["interference_limit"] = cfg.i_bar;
  j["iterations"] = res.iterations;
  j["objective_trace"] = res.objective_trace;
  if (res.partition.has_value()) {
    json p;
    p["in_phase"] = res.partition->in_phase;
    p["anti_phase"] = res.partition->anti_phase;
    p["residual"] = res.partition->residual;
    p["interference"] = res.partition->interference;
    j["partition"] = p;
    const CoherentTerms terms = coherent_terms(ch, cfg, res.subset, res.allocation);
    const PhaseAssignment phases = phases_for_partition(*res.partition, terms);
    json jp = json::object();
    for (const auto& [k, phi] : phases.phi) jp[std::to_string(k)] = phi;
    j["phases_rad"] = jp;
    json jd = json::object();
    for (const auto& [k, d] : phases.delays(cfg.sampling_frequency)) {
      jd[std::to_string(k)] = d;
    }
    j["delays_s"] = jd;
  }
  return j;
}

int run_solve(const std::string& cfg_path, std::uint64_t seed, const std::string& mode_s,
              const std::string& sched_s, const std::string& sel_s,
              const std::vector<int>& relays, int grid_points, bool no_refine,
              const std::string& out_path) {
  const ScenarioConfig cfg = load_scenario_file(cfg_path);
  const ChannelRealization ch = generate_channels(cfg, seed);
  SolverOptions opts = SolverOptions::make(mode_from_string(mode_s),
                                           schedule_from_string(sched_s));
  opts.grid_points = grid_points;
  opts.oracle_refine = !no_refine;

  SolveResult res;
  if (!relays.empty()) {
    if (sel_s != "full") {
      throw std::invalid_argument("--relays and --selection are mutually exclusive");
    }
    res = solve(ch, cfg, RelaySubset::of(relays), opts);
  } else {
    res = solve_selected(ch, cfg, selection_from_string(sel_s), opts);
  }

  json j = result_to_json(res, ch, cfg, opts);
  j["seed"] = seed;
  j["selection"] = relays.empty() ? sel_s : "fixed";
  const std::string text = j.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_file(out_path, text);
  }
  return 0;
}

int run_partition(const std::vector<double>& values, double epsilon,
                  const std::string& algorithm) {
  PartitionInstance inst;
  inst.values = values;
  inst.epsilon = epsilon;
  PartitionSolution sol;
  if (algorithm == "cga") {
    sol = solve_cga(inst);
  } else if (algorithm == "greedy") {
    sol = solve_greedy(inst);
  } else {
    sol = solve_bruteforce(inst);
  }
  double sum1 = 0.0;
  double sum2 = 0.0;
  for (int p : sol.set1) sum1 += values[static_cast<size_t>(p)];
  for (int p : sol.set2) sum2 += values[static_cast<size_t>(p)];

  json j;
  j["values"] = values;
  j["epsilon"] = epsilon;
  j["algorithm"] = algorithm;
  j["set1"] = sol.set1;
  j["set2"] = sol.set2;
  j["sum1"] = sum1;
  j["sum2"] = sum2;
  j["difference"] = sol.difference;
  j["nodes_explored"] = sol.nodes_explored;
  j["terminated_by"] = termination_name(sol.terminated_by);
  std::cout << j.dump(2) << "\n";
  return 0;
}

int run_sweep_cmd(const std::string& cfg_path, const std::string& csv_path,
                  int trials_override, std::uint64_t seed_override, bool seed_given) {
  SweepSpec spec = sweep_spec_from_json(read_file(cfg_path));
  if (trials_override > 0) spec.trials = trials_override;
  if (seed_given) spec.seed = seed_override;
  const SweepOutcome out = run_sweep(spec);
  if (!csv_path.empty()) write_file(csv_path, emit_csv(out.rows));
  std::cout << emit_table(out.rows);
  for (const std::string& e : out.errors) {
    std::cerr << "warning: dropped trial (" << e << ")\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relay power allocation and radar coexistence workbench"};
  app.require_subcommand(1);

  std::string cfg_path, out_path;
  std::uint64_t seed = 1;
  std::string mode_s = "noncoherent";
  std::string sched_s = "greedy1";
  std::string sel_s = "full";
  std::vector<int> relays;
  int grid_points = 41;
  bool no_refine = false;
  auto* solve_cmd = app.add_subcommand("solve", "Optimize powers for one channel draw");
  solve_cmd->add_option("--config", cfg_path, "Scenario JSON file")->required();
  solve_cmd->add_option("--seed", seed, "Channel realization seed");
  solve_cmd->add_option("--mode", mode_s, "noncoherent or coherent")
      ->check(CLI::IsMember({"noncoherent", "coherent"}));
  solve_cmd->add_option("--schedule", sched_s, "greedy1, greedy2, or oracle")
      ->check(CLI::IsMember({"greedy1", "greedy2", "oracle"}));
  solve_cmd->add_option("--selection", sel_s, "full, mrs, or srs")
      ->check(CLI::IsMember({"full", "mrs", "srs"}));
  solve_cmd->add_option("--relays", relays, "Fixed relay subset, e.g. 1,3")
      ->delimiter(',');
  solve_cmd->add_option("--grid-points", grid_points, "Oracle grid points per dimension");
  solve_cmd->add_flag("--no-refine", no_refine, "Skip the oracle polish pass");
  solve_cmd->add_option("--out", out_path, "Write the result JSON here instead of stdout");

  std::vector<double> part_values;
  double epsilon = 0.0;
  std::string algorithm = "cga";
  auto* part_cmd =
      app.add_subcommand("partition", "Split values into two sets with near-equal sums");
  part_cmd->add_option("values", part_values, "Values to split")->required()->expected(-1);
  part_cmd->add_option("--epsilon", epsilon, "Early-stop threshold on the sum difference");
  part_cmd->add_option("--algorithm", algorithm, "cga, greedy, or bruteforce")
      ->check(CLI::IsMember({"cga", "greedy", "bruteforce"}));

  std::string sweep_cfg, sweep_csv;
  int trials_override = -1;
  std::uint64_t seed_override = 0;
  auto* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo sweep over a scenario parameter");
  sweep_cmd->add_option("--config", sweep_cfg, "Sweep JSON file")->required();
  sweep_cmd->add_option("--out", sweep_csv, "CSV output path");
  sweep_cmd->add_option("--trials", trials_override, "Override the trial count");
  auto* seed_opt = sweep_cmd->add_option("--seed", seed_override, "Override the base seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed()) {
      return run_solve(cfg_path, seed, mode_s, sched_s, sel_s, relays, grid_points,
                       no_refine, out_path);
    }
    if (part_cmd->parsed()) {
      return run_partition(part_values, epsilon, algorithm);
    }
    return run_sweep_cmd(sweep_cfg, sweep_csv, trials_override, seed_override,
                         seed_opt->count() > 0);
  } catch (const std::exception& e) {
    nlohmann::json err;
    err["error"] = e.what();
    std::cerr << err.dump() << "\n";
    return 1;
  }
}
