#include "relaycoex/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace relaycoex {

ScenarioConfig apply_parameter(const ScenarioConfig& base, const std::string& name,
                               double value) {
  ScenarioConfig cfg = base;
  if (name == "i_bar") {
    cfg.i_bar = value;
  } else if (name == "i_bar_db") {
    cfg.i_bar = db_to_linear(value);
  } else if (name == "p_max") {
    cfg.p_s_max = value;
    cfg.set_p_r_max(value);
  } else if (name == "p_max_db") {
    const double lin = db_to_linear(value);
    cfg.p_s_max = lin;
    cfg.set_p_r_max(lin);
  } else if (name == "p_s_max") {
    cfg.p_s_max = value;
  } else if (name == "p_s_max_db") {
    cfg.p_s_max = db_to_linear(value);
  } else if (name == "p_r_max") {
    cfg.set_p_r_max(value);
  } else if (name == "p_r_max_db") {
    cfg.set_p_r_max(db_to_linear(value));
  } else if (name == "zeta") {
    cfg.set_zeta(value);
  } else {
    throw std::invalid_argument("unknown sweep parameter: " + name);
  }
  return cfg;
}

namespace {

int thread_count(std::size_t task_count) {
  long n = 0;
  if (const char* env = std::getenv("RELAYCOEX_THREADS")) {
    char* end = nullptr;
    n = std::strtol(env, &end, 10);
    if (end == env || n < 1) n = 0;
  }
  if (n < 1) {
    const unsigned hw = std::thread::hardware_concurrency();
    n = hw > 0 ? static_cast<long>(hw) : 1;
  }
  if (static_cast<std::size_t>(n) > task_count) n = static_cast<long>(task_count);
  return static_cast<int>(n);
}

std::string fmt_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

SweepOutcome run_sweep(const SweepSpec& spec) {
  if (spec.values.empty()) throw std::invalid_argument("run_sweep: no swept values");
  if (spec.trials < 1) throw std::invalid_argument("run_sweep: trials must be >= 1");
  if (spec.algorithms.empty()) throw std::invalid_argument("run_sweep: no algorithms");
  spec.base_options.validate();

  const std::size_t nv = spec.values.size();
  const std::size_t nt = static_cast<std::size_t>(spec.trials);
  const std::size_t na = spec.algorithms.size();

  std::vector<ScenarioConfig> cfgs;
  cfgs.reserve(nv);
  for (double v : spec.values) {
    ScenarioConfig cfg = apply_parameter(spec.base, spec.parameter, v);
    cfg.validate();
    cfgs.push_back(std::move(cfg));
  }

  struct Cell {
    double rate = 0.0;
    double ms = 0.0;
  };
  std::vector<Cell> cells(nv * nt * na);
  std::vector<std::unique_ptr<SolveResult>> kept;
  if (spec.keep_results) kept.resize(nv * nt * na);
  std::vector<std::uint8_t> trial_ok(nv * nt, 1);
  std::vector<std::string> trial_err(nv * nt);

  auto run_task = [&](std::size_t task) {
    const std::size_t vi = task / nt;
    const std::size_t t = task % nt;
    try {
      const ScenarioConfig& cfg = cfgs[vi];
      const ChannelRealization ch =
          generate_channels(cfg, spec.seed + static_cast<std::uint64_t>(t));
      for (std::size_t a = 0; a < na; ++a) {
        const AlgorithmSpec& alg = spec.algorithms[a];
        SolverOptions opts = spec.base_options;
        opts.mode = alg.mode;
        opts.schedule = alg.schedule;
        opts.block_size = alg.schedule == Schedule::greedy2 ? 2 : 1;
        double ms = 0.0;
        SolveResult r;
        if (spec.measure_time) {
          const auto t0 = std::chrono::steady_clock::now();
          r = solve_selected(ch, cfg, alg.selection, opts);
          const auto t1 = std::chrono::steady_clock::now();
          ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        } else {
          r = solve_selected(ch, cfg, alg.selection, opts);
        }
        const std::size_t slot = (vi * nt + t) * na + a;
        cells[slot] = {r.rate, ms};
        if (spec.keep_results) kept[slot] = std::make_unique<SolveResult>(std::move(r));
      }
    } catch (const std::exception& e) {
      trial_ok[vi * nt + t] = 0;
      std::ostringstream os;
      os << "value=" << spec.values[vi] << " trial=" << t << ": " << e.what();
      trial_err[vi * nt + t] = os.str();
    }
  };

  const std::size_t tasks = nv * nt;
  const int workers = thread_count(tasks);
  if (workers <= 1) {
    for (std::size_t i = 0; i < tasks; ++i) run_task(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= tasks) break;
          run_task(i);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  SweepOutcome out;
  for (std::size_t i = 0; i < tasks; ++i) {
    if (!trial_ok[i]) out.errors.push_back(trial_err[i]);
  }

  // Per (value, algorithm) statistics over kept trials, in input order.
  std::vector<std::vector<double>> means(nv, std::vector<double>(na, 0.0));
  for (std::size_t vi = 0; vi < nv; ++vi) {
    for (std::size_t a = 0; a < na; ++a) {
      double sum = 0.0;
      double sum_ms = 0.0;
      int n = 0;
      for (std::size_t t = 0; t < nt; ++t) {
        if (!trial_ok[vi * nt + t]) continue;
        const Cell& c = cells[(vi * nt + t) * na + a];
        sum += c.rate;
        sum_ms += c.ms;
        ++n;
      }
      const double mean = n > 0 ? sum / n : std::nan("");
      means[vi][a] = mean;
      double sq = 0.0;
      for (std::size_t t = 0; t < nt; ++t) {
        if (!trial_ok[vi * nt + t]) continue;
        const double d = cells[(vi * nt + t) * na + a].rate - mean;
        sq += d * d;
      }
      SweepRow row;
      row.swept_name = spec.parameter;
      row.swept_value = spec.values[vi];
      row.mode = spec.algorithms[a].mode;
      row.schedule = spec.algorithms[a].schedule;
      row.selection = spec.algorithms[a].selection;
      row.mean_rate = mean;
      row.stderr_rate = n > 1 ? std::sqrt(sq / (n - 1)) / std::sqrt(static_cast<double>(n)) : 0.0;
      row.mean_solve_ms = (spec.measure_time && n > 0) ? sum_ms / n : 0.0;
      row.trials_used = n;
      out.rows.push_back(std::move(row));
    }
  }

  // Gap against the first oracle column of the same mode, when one exists.
  for (std::size_t vi = 0; vi < nv; ++vi) {
    for (std::size_t a = 0; a < na; ++a) {
      std::size_t ref = na;
      for (std::size_t b = 0; b < na; ++b) {
        if (spec.algorithms[b].schedule == Schedule::grid_oracle &&
            spec.algorithms[b].mode == spec.algorithms[a].mode) {
          ref = b;
          break;
        }
      }
      if (ref == na) continue;
      const double om = means[vi][ref];
      if (!(om > 0.0)) continue;
      out.rows[vi * na + a].gap_pct = 100.0 * (om - means[vi][a]) / om;
    }
  }

  if (spec.keep_results) {
    for (std::size_t vi = 0; vi < nv; ++vi) {
      for (std::size_t t = 0; t < nt; ++t) {
        if (!trial_ok[vi * nt + t]) continue;
        for (std::size_t a = 0; a < na; ++a) {
          const std::size_t slot = (vi * nt + t) * na + a;
          TrialRecord rec;
          rec.value_index = static_cast<int>(vi);
          rec.trial = static_cast<int>(t);
          rec.algorithm_index = static_cast<int>(a);
          rec.result = std::move(*kept[slot]);
          rec.solve_ms = cells[slot].ms;
          out.results.push_back(std::move(rec));
        }
      }
    }
  }
  return out;
}

std::string emit_csv(const std::vector<SweepRow>& rows) {
  std::string out =
      "swept_name,swept_value,mode,schedule,selection,"
      "mean_rate_bps_hz,stderr,gap_pct,mean_solve_ms\n";
  for (const SweepRow& r : rows) {
    out += csv_field(r.swept_name);
    out += ',';
    out += fmt_g17(r.swept_value);
    out += ',';
    out += to_string(r.mode);
    out += ',';
    out += to_string(r.schedule);
    out += ',';
    out += to_string(r.selection);
    out += ',';
    out += fmt_g17(r.mean_rate);
    out += ',';
    out += fmt_g17(r.stderr_rate);
    out += ',';
    if (r.gap_pct.has_value()) out += fmt_g17(*r.gap_pct);
    out += ',';
    out += fmt_g17(r.mean_solve_ms);
    out += '\n';
  }
  return out;
}

std::string emit_table(const std::vector<SweepRow>& rows) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%10s  %-11s  %-8s  %-9s  %10s  %8s  %9s\n",
                "value", "mode", "schedule", "selection", "mean_rate", "stderr",
                "gap_pct");
  out += line;
  for (const SweepRow& r : rows) {
    char gap[32];
    if (r.gap_pct.has_value()) {
      std::snprintf(gap, sizeof gap, "%9.3f", *r.gap_pct);
    } else {
      std::snprintf(gap, sizeof gap, "%9s", "-");
    }
    std::snprintf(line, sizeof line, "%10.4f  %-11s  %-8s  %-9s  %10.4f  %8.4f  %s\n",
                  r.swept_value, to_string(r.mode), to_string(r.schedule),
                  to_string(r.selection), r.mean_rate, r.stderr_rate, gap);
    out += line;
  }
  return out;
}

SweepSpec sweep_spec_from_json(const std::string& text) {
  SweepSpec spec;
  spec.base = scenario_from_json(text);

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("sweep config: ") + e.what());
  }
  if (!j.contains("sweep")) {
    throw std::invalid_argument("sweep_spec_from_json: missing \"sweep\" object");
  }
  const nlohmann::json& s = j.at("sweep");
  if (!s.is_object()) {
    throw std::invalid_argument("sweep_spec_from_json: \"sweep\" must be an object");
  }
  for (const auto& item : s.items()) {
    const std::string& key = item.key();
    if (key != "parameter" && key != "values" && key != "trials" && key != "seed" &&
        key != "algorithms" && key != "grid_points" && key != "oracle_refine" &&
        key != "measure_time") {
      throw std::invalid_argument("sweep_spec_from_json: unknown key sweep." + key);
    }
  }

  spec.parameter = s.at("parameter").get<std::string>();
  spec.values.clear();
  for (const auto& v : s.at("values")) {
    if (!v.is_number()) {
      throw std::invalid_argument("sweep_spec_from_json: values must be numbers");
    }
    spec.values.push_back(v.get<double>());
  }
  if (spec.values.empty()) {
    throw std::invalid_argument("sweep_spec_from_json: values is empty");
  }
  if (s.contains("trials")) spec.trials = s.at("trials").get<int>();
  if (s.contains("seed")) spec.seed = s.at("seed").get<std::uint64_t>();
  if (s.contains("grid_points")) {
    spec.base_options.grid_points = s.at("grid_points").get<int>();
  }
  if (s.contains("oracle_refine")) {
    spec.base_options.oracle_refine = s.at("oracle_refine").get<bool>();
  }
  if (s.contains("measure_time")) spec.measure_time = s.at("measure_time").get<bool>();

  const nlohmann::json& algs = s.at("algorithms");
  if (!algs.is_array() || algs.empty()) {
    throw std::invalid_argument("sweep_spec_from_json: algorithms must be a nonempty array");
  }
  spec.algorithms.clear();
  for (const auto& a : algs) {
    if (!a.is_object()) {
      throw std::invalid_argument("sweep_spec_from_json: algorithm entries must be objects");
    }
    for (const auto& item : a.items()) {
      const std::string& key = item.key();
      if (key != "mode" && key != "schedule" && key != "selection") {
        throw std::invalid_argument("sweep_spec_from_json: unknown key algorithms." + key);
      }
    }
    AlgorithmSpec alg;
    alg.mode = mode_from_string(a.at("mode").get<std::string>());
    alg.schedule = schedule_from_string(a.at("schedule").get<std::string>());
    if (a.contains("selection")) {
      alg.selection = selection_from_string(a.at("selection").get<std::string>());
    }
    spec.algorithms.push_back(alg);
  }
  return spec;
}

}  // namespace relaycoex
