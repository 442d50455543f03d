#pragma once

#include <string>
#include <vector>

#include "relaycoex/optimizer.hpp"

namespace relaycoex {

// Which relays compete for the transmission.
//  full: every relay is used, no search.
//  mrs:  best subset over all nonempty combinations.
//  srs:  best single relay.
enum class SelectionPolicy { full, mrs, srs };

const char* to_string(SelectionPolicy policy);
SelectionPolicy selection_from_string(const std::string& s);

// All nonempty subsets ordered by size, then lexicographically by indices.
// Limited to 10 relays.
std::vector<RelaySubset> enumerate_subsets(int relay_count);

// Solve every candidate subset with the same options and keep the best rate.
// Ties go to the earlier candidate, i.e. the smaller and lexicographically
// lower subset.
SolveResult select_multi(const ChannelRealization& ch, const ScenarioConfig& cfg,
                         const SolverOptions& opts);
SolveResult select_single(const ChannelRealization& ch, const ScenarioConfig& cfg,
                          const SolverOptions& opts);

SolveResult solve_selected(const ChannelRealization& ch, const ScenarioConfig& cfg,
                           SelectionPolicy policy, const SolverOptions& opts);

}  // namespace relaycoex
