#include "relaycoex/rate.hpp"

#include <cmath>
#include <stdexcept>

namespace relaycoex {

namespace {

double abs2(const cxd& z) { return std::norm(z); }

// P_S |h_SR_k|^2 + sum_j zeta_j P_R_j |h_RR(j,k)|^2 + sigma^2_k, the average
// receive power at relay k. The j-sum runs over the active subset and
// includes j = k through the residual loop channel.
double receive_power(const ChannelRealization& ch, const ScenarioConfig& cfg,
                     const RelaySubset& subset, const PowerAllocation& alloc, int k) {
  const int ki = k - 1;
  double acc = alloc.p_s * abs2(ch.h_sr[static_cast<size_t>(ki)]);
  for (int j : subset.indices) {
    const int ji = j - 1;
    acc += cfg.zeta[static_cast<size_t>(ji)] * alloc.relay_power(j) * abs2(ch.rr(ji, ki));
  }
  acc += cfg.noise_power_relay[static_cast<size_t>(ki)];
  return acc;
}

// sum_j zeta_j |h_RR(j,k)|^2 P_R_j, the residual-loop part alone.
double loop_power(const ChannelRealization& ch, const ScenarioConfig& cfg,
                  const RelaySubset& subset, const PowerAllocation& alloc, int k) {
  const int ki = k - 1;
  double acc = 0.0;
  for (int j : subset.indices) {
    const int ji = j - 1;
    acc += cfg.zeta[static_cast<size_t>(ji)] * abs2(ch.rr(ji, ki)) * alloc.relay_power(j);
  }
  return acc;
}

// a*b/(1+a+b) written as a*N/(D*(1+a)+N) with b = N/D, which stays finite
// for D -> 0 and avoids the 0/0 when the numerator vanishes too.
double sinr_summand(double a, double num, double den) {
  if (a <= 0.0 || num <= 0.0) return 0.0;
  return a * num / (den * (1.0 + a) + num);
}

}  // namespace

double amplification_gain(const ChannelRealization& ch, const ScenarioConfig& cfg,
                          const RelaySubset& subset, const PowerAllocation& alloc,
                          int k) {
  subset.validate(cfg.relay_count);
  if (!subset.contains(k)) {
    throw std::invalid_argument("amplification_gain: relay not in subset");
  }
  return 1.0 / std::sqrt(receive_power(ch, cfg, subset, alloc, k));
}

RateBreakdown achievable_rate(const ChannelRealization& ch, const ScenarioConfig& cfg,
                              const RelaySubset& subset, const PowerAllocation& alloc) {
  subset.validate(cfg.relay_count);
  RateBreakdown out;
  double total = 0.0;
  for (int k : subset.indices) {
    const int ki = k - 1;
    const double a = alloc.relay_power(k) * abs2(ch.h_rd[static_cast<size_t>(ki)]) /
                     cfg.noise_power_dest;
    const double num = alloc.p_s * abs2(ch.h_sr[static_cast<size_t>(ki)]);
    const double den = loop_power(ch, cfg, subset, alloc, k) +
                       cfg.noise_power_relay[static_cast<size_t>(ki)];
    const double term = sinr_summand(a, num, den);
    out.per_relay_sinr_term[k] = term;
    out.gain[k] = 1.0 / std::sqrt(receive_power(ch, cfg, subset, alloc, k));
    total += term;
  }
  out.total_rate = std::log2(1.0 + total);
  return out;
}

double simplified_rate_objective(const ChannelRealization& ch, const ScenarioConfig& cfg,
                                 const RelaySubset& subset, const PowerAllocation& alloc) {
  subset.validate(cfg.relay_count);
  double total = 0.0;
  for (int k : subset.indices) {
    const int ki = k - 1;
    const double den = loop_power(ch, cfg, subset, alloc, k);
    if (den <= 0.0) {
      throw std::domain_error(
          "simplified_rate_objective: zero residual-loop power at relay " +
          std::to_string(k));
    }
    const double a = alloc.relay_power(k) * abs2(ch.h_rd[static_cast<size_t>(ki)]) /
                     cfg.noise_power_dest;
    const double num = alloc.p_s * abs2(ch.h_sr[static_cast<size_t>(ki)]);
    total += sinr_summand(a, num, den);
  }
  return total;
}

}  // namespace relaycoex
