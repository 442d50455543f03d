#include "relaycoex/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace relaycoex {

double db_to_linear(double x_db) { return std::pow(10.0, x_db / 10.0); }

double linear_to_db(double x_linear) {
  if (!(x_linear > 0.0)) {
    throw std::domain_error("linear_to_db: value must be positive");
  }
  return 10.0 * std::log10(x_linear);
}

ScenarioConfig ScenarioConfig::defaults(int relay_count) {
  ScenarioConfig cfg;
  cfg.relay_count = relay_count;
  cfg.noise_power_relay.assign(static_cast<size_t>(relay_count), 1.0);
  cfg.zeta.assign(static_cast<size_t>(relay_count), 0.01);
  cfg.p_r_max.assign(static_cast<size_t>(relay_count), 100.0);
  return cfg;
}

void ScenarioConfig::set_zeta(double z) {
  zeta.assign(static_cast<size_t>(relay_count), z);
}

void ScenarioConfig::set_noise_power_relay(double p) {
  noise_power_relay.assign(static_cast<size_t>(relay_count), p);
}

void ScenarioConfig::set_p_r_max(double p) {
  p_r_max.assign(static_cast<size_t>(relay_count), p);
}

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

void check_interval(const Interval& iv, const std::string& name) {
  require(iv.lo >= 0.0 && iv.hi >= iv.lo, name + ": need 0 <= lo <= hi");
}

}  // namespace

void ScenarioConfig::validate() const {
  require(relay_count >= 1, "relay_count must be >= 1");
  const auto k = static_cast<size_t>(relay_count);
  require(noise_power_relay.size() == k, "noise_power_relay size != relay_count");
  require(zeta.size() == k, "zeta size != relay_count");
  require(p_r_max.size() == k, "p_r_max size != relay_count");
  for (double v : noise_power_relay) require(v > 0.0, "noise_power_relay must be > 0");
  require(noise_power_dest > 0.0, "noise_power_dest must be > 0");
  require(noise_power_pu > 0.0, "noise_power_pu must be > 0");
  require(var_sr >= 0.0, "var_sr must be >= 0");
  require(var_rd >= 0.0, "var_rd must be >= 0");
  require(var_sd >= 0.0, "var_sd must be >= 0");
  check_interval(var_rr, "var_rr");
  check_interval(var_sp, "var_sp");
  check_interval(var_rp, "var_rp");
  for (double z : zeta) require(z >= 0.0, "zeta must be >= 0");
  require(p_s_max > 0.0, "p_s_max must be > 0");
  for (double v : p_r_max) require(v > 0.0, "p_r_max must be > 0");
  require(i_bar > 0.0, "i_bar must be > 0");
  require(sampling_frequency > 0.0, "sampling_frequency must be > 0");
}

namespace {

// One circularly symmetric complex Gaussian draw with E|h|^2 = var.
// Zero variance consumes no randomness so degenerate links stay exact zeros.
cxd draw_cn(std::mt19937_64& rng, double var) {
  if (var <= 0.0) return cxd(0.0, 0.0);
  std::normal_distribution<double> n(0.0, std::sqrt(var / 2.0));
  const double re = n(rng);
  const double im = n(rng);
  return cxd(re, im);
}

double draw_uniform(std::mt19937_64& rng, const Interval& iv) {
  if (iv.hi <= iv.lo) return iv.lo;
  std::uniform_real_distribution<double> u(iv.lo, iv.hi);
  return u(rng);
}

}  // namespace

ChannelRealization generate_channels(const ScenarioConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const int k_count = cfg.relay_count;
  const auto n = static_cast<size_t>(k_count);
  std::mt19937_64 rng(seed);

  // Draw order is fixed: link variances first, then coefficients.
  const double v_sp = draw_uniform(rng, cfg.var_sp);
  std::vector<double> v_rp(n);
  for (auto& v : v_rp) v = draw_uniform(rng, cfg.var_rp);
  std::vector<double> v_rr(n * n);
  for (auto& v : v_rr) v = draw_uniform(rng, cfg.var_rr);

  ChannelRealization ch;
  ch.h_sr.resize(n);
  ch.h_rd.resize(n);
  ch.h_rp.resize(n);
  ch.h_rr.resize(n * n);
  for (auto& h : ch.h_sr) h = draw_cn(rng, cfg.var_sr);
  for (auto& h : ch.h_rd) h = draw_cn(rng, cfg.var_rd);
  ch.h_sd = draw_cn(rng, cfg.var_sd);
  ch.h_sp = draw_cn(rng, v_sp);
  for (size_t i = 0; i < n; ++i) ch.h_rp[i] = draw_cn(rng, v_rp[i]);
  for (size_t i = 0; i < n * n; ++i) ch.h_rr[i] = draw_cn(rng, v_rr[i]);
  return ch;
}

RelaySubset RelaySubset::full(int relay_count) {
  RelaySubset s;
  s.indices.resize(static_cast<size_t>(relay_count));
  for (int i = 0; i < relay_count; ++i) s.indices[static_cast<size_t>(i)] = i + 1;
  return s;
}

RelaySubset RelaySubset::of(std::vector<int> idx) {
  RelaySubset s;
  s.indices = std::move(idx);
  std::sort(s.indices.begin(), s.indices.end());
  return s;
}

bool RelaySubset::contains(int k) const {
  return std::binary_search(indices.begin(), indices.end(), k);
}

void RelaySubset::validate(int relay_count) const {
  require(!indices.empty(), "relay subset must be nonempty");
  int prev = 0;
  for (int k : indices) {
    require(k >= 1 && k <= relay_count, "relay index out of range");
    require(k > prev, "relay indices must be sorted and distinct");
    prev = k;
  }
}

double PowerAllocation::relay_power(int k) const {
  auto it = p_r.find(k);
  if (it == p_r.end()) {
    throw std::invalid_argument("allocation missing relay " + std::to_string(k));
  }
  return it->second;
}

void validate_allocation(const ScenarioConfig& cfg, const RelaySubset& subset,
                         const PowerAllocation& alloc) {
  subset.validate(cfg.relay_count);
  require(alloc.p_s >= 0.0 && alloc.p_s <= cfg.p_s_max,
          "p_s outside [0, p_s_max]");
  require(alloc.p_r.size() == subset.indices.size(),
          "allocation domain does not match subset");
  for (int k : subset.indices) {
    const double p = alloc.relay_power(k);
    require(p >= 0.0 && p <= cfg.p_r_max[static_cast<size_t>(k - 1)],
            "relay power outside [0, p_r_max]");
  }
}

namespace {

using nlohmann::json;

// Reads a scalar that may be given as "<name>" or "<name>_db".
bool read_scalar(const json& j, const std::string& name, double& out) {
  const bool plain = j.contains(name);
  const bool db = j.contains(name + "_db");
  if (plain && db) {
    throw std::invalid_argument("config: both " + name + " and " + name + "_db given");
  }
  if (plain) {
    out = j.at(name).get<double>();
    return true;
  }
  if (db) {
    out = db_to_linear(j.at(name + "_db").get<double>());
    return true;
  }
  return false;
}

// Per-relay vector field: scalar broadcast or a length-K array.
bool read_vector(const json& j, const std::string& name, int k, bool allow_db,
                 std::vector<double>& out) {
  std::string key = name;
  bool db = false;
  if (!j.contains(key) && allow_db && j.contains(name + "_db")) {
    key = name + "_db";
    db = true;
  } else if (j.contains(name) && allow_db && j.contains(name + "_db")) {
    throw std::invalid_argument("config: both " + name + " and " + name + "_db given");
  }
  if (!j.contains(key)) return false;
  const json& v = j.at(key);
  std::vector<double> vals;
  if (v.is_number()) {
    vals.assign(static_cast<size_t>(k), v.get<double>());
  } else if (v.is_array()) {
    if (v.size() != static_cast<size_t>(k)) {
      throw std::invalid_argument("config: " + key + " array size != relay_count");
    }
    vals = v.get<std::vector<double>>();
  } else {
    throw std::invalid_argument("config: " + key + " must be a number or array");
  }
  if (db) {
    for (auto& x : vals) x = db_to_linear(x);
  }
  out = std::move(vals);
  return true;
}

bool read_interval(const json& j, const std::string& name, Interval& out) {
  if (!j.contains(name)) return false;
  const json& v = j.at(name);
  if (v.is_number()) {
    out.lo = out.hi = v.get<double>();
  } else if (v.is_array() && v.size() == 2) {
    out.lo = v.at(0).get<double>();
    out.hi = v.at(1).get<double>();
  } else {
    throw std::invalid_argument("config: " + name + " must be a number or [lo, hi]");
  }
  return true;
}

const char* const kScalarKeys[] = {
    "noise_power_dest", "noise_power_pu", "var_sr", "var_rd", "var_sd",
    "p_s_max", "i_bar", "sampling_frequency"};
const char* const kVectorKeys[] = {"noise_power_relay", "zeta", "p_r_max"};
const char* const kIntervalKeys[] = {"var_rr", "var_sp", "var_rp"};

bool known_key(const std::string& key) {
  if (key == "relay_count" || key == "sweep") return true;
  if (!key.empty() && key[0] == '_') return true;
  auto matches = [&key](const std::string& base) {
    return key == base || key == base + "_db";
  };
  for (const char* k : kScalarKeys) {
    if (matches(k)) return true;
  }
  for (const char* k : kVectorKeys) {
    if (matches(k)) return true;
  }
  for (const char* k : kIntervalKeys) {
    if (key == k) return true;
  }
  return false;
}

}  // namespace

ScenarioConfig scenario_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  for (const auto& item : j.items()) {
    if (!known_key(item.key())) {
      throw std::invalid_argument("config: unknown key \"" + item.key() + "\"");
    }
  }
  int k = 1;
  if (j.contains("relay_count")) k = j.at("relay_count").get<int>();
  if (k < 1) throw std::invalid_argument("config: relay_count must be >= 1");

  ScenarioConfig cfg = ScenarioConfig::defaults(k);
  read_scalar(j, "noise_power_dest", cfg.noise_power_dest);
  read_scalar(j, "noise_power_pu", cfg.noise_power_pu);
  read_scalar(j, "var_sr", cfg.var_sr);
  read_scalar(j, "var_rd", cfg.var_rd);
  read_scalar(j, "var_sd", cfg.var_sd);
  read_scalar(j, "p_s_max", cfg.p_s_max);
  read_scalar(j, "i_bar", cfg.i_bar);
  read_scalar(j, "sampling_frequency", cfg.sampling_frequency);
  read_vector(j, "noise_power_relay", k, true, cfg.noise_power_relay);
  read_vector(j, "zeta", k, false, cfg.zeta);
  read_vector(j, "p_r_max", k, true, cfg.p_r_max);
  read_interval(j, "var_rr", cfg.var_rr);
  read_interval(j, "var_sp", cfg.var_sp);
  read_interval(j, "var_rp", cfg.var_rp);
  cfg.validate();
  return cfg;
}

std::string scenario_to_json(const ScenarioConfig& cfg) {
  json j;
  j["relay_count"] = cfg.relay_count;
  j["noise_power_relay"] = cfg.noise_power_relay;
  j["noise_power_dest"] = cfg.noise_power_dest;
  j["noise_power_pu"] = cfg.noise_power_pu;
  j["var_sr"] = cfg.var_sr;
  j["var_rd"] = cfg.var_rd;
  j["var_sd"] = cfg.var_sd;
  j["var_rr"] = {cfg.var_rr.lo, cfg.var_rr.hi};
  j["var_sp"] = {cfg.var_sp.lo, cfg.var_sp.hi};
  j["var_rp"] = {cfg.var_rp.lo, cfg.var_rp.hi};
  j["zeta"] = cfg.zeta;
  j["p_s_max"] = cfg.p_s_max;
  j["p_r_max"] = cfg.p_r_max;
  j["i_bar"] = cfg.i_bar;
  j["sampling_frequency"] = cfg.sampling_frequency;
  return j.dump(2);
}

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return scenario_from_json(ss.str());
}

}  // namespace relaycoex
