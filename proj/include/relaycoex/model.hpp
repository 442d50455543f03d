#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace relaycoex {

using cxd = std::complex<double>;

// 10^(x/10). Conversions happen only at config boundaries; everything
// downstream works in linear units.
double db_to_linear(double x_db);

// 10*log10(x). Throws std::domain_error for x <= 0.
double linear_to_db(double x_linear);

// Closed interval used for per-link variance ranges.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Static scenario description: node counts, per-link variances, noise powers,
// self-interference quality, power caps and the interference threshold.
// All values are linear; JSON config keys may carry a _db suffix instead.
struct ScenarioConfig {
  int relay_count = 1;

  std::vector<double> noise_power_relay;  // per relay, watts
  double noise_power_dest = 1.0;
  double noise_power_pu = 1.0;

  double var_sr = 1.0;   // source -> relay links
  double var_rd = 1.0;   // relay -> destination links
  double var_sd = 0.1;   // direct source -> destination link
  Interval var_rr{0.5, 1.0};  // inter-relay links, sampled per pair
  Interval var_sp{0.8, 1.0};  // source -> radar link, sampled per trial
  Interval var_rp{0.8, 1.0};  // relay -> radar links, sampled per relay

  std::vector<double> zeta;     // residual self-interference quality, per relay
  double p_s_max = 100.0;       // source power cap
  std::vector<double> p_r_max;  // relay power caps
  double i_bar = 1.0;           // interference threshold at the radar
  double sampling_frequency = 1e6;  // Hz, maps phases to sample delays

  // Config with all per-relay vectors sized and set to the scalar defaults.
  static ScenarioConfig defaults(int relay_count);

  void set_zeta(double z);
  void set_noise_power_relay(double p);
  void set_p_r_max(double p);

  // Throws std::invalid_argument when sizes or ranges are off.
  void validate() const;
};

// One draw of every channel coefficient. Coefficients are circularly
// symmetric complex Gaussian; entries are 0-based.
struct ChannelRealization {
  std::vector<cxd> h_sr;  // source -> relay k
  std::vector<cxd> h_rd;  // relay k -> destination
  std::vector<cxd> h_rp;  // relay k -> radar
  cxd h_sd{0.0, 0.0};     // source -> destination
  cxd h_sp{0.0, 0.0};     // source -> radar
  std::vector<cxd> h_rr;  // row-major K*K; rr(j,k) is relay j -> relay k

  int relay_count() const { return static_cast<int>(h_sr.size()); }
  cxd rr(int j, int k) const { return h_rr[static_cast<size_t>(j) * h_sr.size() + k]; }
};

// Deterministic for a fixed (config, seed) pair. Per-pair inter-relay and
// relay->radar variances are drawn uniformly from their intervals using the
// same seed stream, then the coefficients themselves. Links with zero
// variance produce an exact zero coefficient and consume no draws.
ChannelRealization generate_channels(const ScenarioConfig& cfg, std::uint64_t seed);

// Active relay subset. Indices are 1-based, sorted and distinct.
struct RelaySubset {
  std::vector<int> indices;

  static RelaySubset full(int relay_count);
  static RelaySubset of(std::vector<int> idx);

  int size() const { return static_cast<int>(indices.size()); }
  bool contains(int k) const;

  // Throws std::invalid_argument unless nonempty, sorted, distinct, in 1..K.
  void validate(int relay_count) const;
};

// Transmit powers for the source and the active relays. p_r is defined on
// exactly the active subset.
struct PowerAllocation {
  double p_s = 0.0;
  std::map<int, double> p_r;

  double relay_power(int k) const;
};

// Checks the allocation covers exactly `subset`, respects nonnegativity and
// the config's power caps. Throws std::invalid_argument.
void validate_allocation(const ScenarioConfig& cfg, const RelaySubset& subset,
                         const PowerAllocation& alloc);

// JSON text <-> config. Keys match the field names; scalar-valued fields may
// appear as "<name>_db" instead. zeta, noise_power_relay and p_r_max accept a
// scalar (broadcast) or a length-K array; interval fields accept a scalar or
// a [lo, hi] pair. Unknown keys are rejected except "sweep" and keys starting
// with "_".
ScenarioConfig scenario_from_json(const std::string& text);
std::string scenario_to_json(const ScenarioConfig& cfg);
ScenarioConfig load_scenario_file(const std::string& path);

}  // namespace relaycoex
