#pragma once

#include <map>

#include "relaycoex/model.hpp"

namespace relaycoex {

// Per-relay pieces of the end-to-end rate at one allocation.
struct RateBreakdown {
  std::map<int, double> per_relay_sinr_term;  // relay k -> its SINR summand
  std::map<int, double> gain;                 // relay k -> amplification gain
  double total_rate = 0.0;                    // bits/s/Hz
};

// Amplify-and-forward gain for relay k: normalizes the relay's received
// power (desired signal + residual loops from every active relay + noise)
// to unit average transmit power. Throws if k is not in the subset.
double amplification_gain(const ChannelRealization& ch, const ScenarioConfig& cfg,
                          const RelaySubset& subset, const PowerAllocation& alloc,
                          int k);

// End-to-end achievable rate of the relay path,
//   C = log2(1 + sum_k a_k b_k / (1 + a_k + b_k)),
// where a_k is relay k's link SNR to the destination and b_k the source SNR
// at relay k after residual self-interference. The direct source->destination
// link does not contribute. Throws on an empty or mismatched subset.
RateBreakdown achievable_rate(const ChannelRealization& ch, const ScenarioConfig& cfg,
                              const RelaySubset& subset, const PowerAllocation& alloc);

// High-self-interference surrogate: the same per-relay summands with the
// relay noise dropped from b_k's denominator, returned as the inner sum
// (no log). Throws std::domain_error when some relay's residual-loop power
// is zero, which signals the surrogate is invalid there.
double simplified_rate_objective(const ChannelRealization& ch, const ScenarioConfig& cfg,
                                 const RelaySubset& subset, const PowerAllocation& alloc);

}  // namespace relaycoex
