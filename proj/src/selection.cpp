#include "relaycoex/selection.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>

namespace relaycoex {

const char* to_string(SelectionPolicy policy) {
  switch (policy) {
    case SelectionPolicy::full: return "full";
    case SelectionPolicy::mrs: return "mrs";
    default: return "srs";
  }
}

SelectionPolicy selection_from_string(const std::string& s) {
  if (s == "full") return SelectionPolicy::full;
  if (s == "mrs") return SelectionPolicy::mrs;
  if (s == "srs") return SelectionPolicy::srs;
  throw std::invalid_argument("unknown selection policy: " + s);
}

std::vector<RelaySubset> enumerate_subsets(int relay_count) {
  if (relay_count < 1) {
    throw std::invalid_argument("enumerate_subsets: relay_count must be >= 1");
  }
  if (relay_count > 10) {
    throw std::invalid_argument("enumerate_subsets: limited to 10 relays");
  }
  std::vector<RelaySubset> out;
  out.reserve((1u << relay_count) - 1);
  for (unsigned mask = 1; mask < (1u << relay_count); ++mask) {
    std::vector<int> idx;
    for (int k = 1; k <= relay_count; ++k) {
      if (mask & (1u << (k - 1))) idx.push_back(k);
    }
    out.push_back(RelaySubset::of(idx));
  }
  std::sort(out.begin(), out.end(), [](const RelaySubset& a, const RelaySubset& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a.indices < b.indices;
  });
  return out;
}

namespace {

SolveResult best_over(const std::vector<RelaySubset>& candidates,
                      const ChannelRealization& ch, const ScenarioConfig& cfg,
                      const SolverOptions& opts) {
  std::optional<SolveResult> best;
  for (const RelaySubset& s : candidates) {
    SolveResult r = solve(ch, cfg, s, opts);
    if (!best || r.rate > best->rate) best = std::move(r);
  }
  return *best;
}

}  // namespace

SolveResult select_multi(const ChannelRealization& ch, const ScenarioConfig& cfg,
                         const SolverOptions& opts) {
  return best_over(enumerate_subsets(cfg.relay_count), ch, cfg, opts);
}

SolveResult select_single(const ChannelRealization& ch, const ScenarioConfig& cfg,
                          const SolverOptions& opts) {
  std::vector<RelaySubset> singles;
  singles.reserve(static_cast<size_t>(cfg.relay_count));
  for (int k = 1; k <= cfg.relay_count; ++k) {
    singles.push_back(RelaySubset::of({k}));
  }
  return best_over(singles, ch, cfg, opts);
}

SolveResult solve_selected(const ChannelRealization& ch, const ScenarioConfig& cfg,
                           SelectionPolicy policy, const SolverOptions& opts) {
  switch (policy) {
    case SelectionPolicy::mrs: return select_multi(ch, cfg, opts);
    case SelectionPolicy::srs: return select_single(ch, cfg, opts);
    default: return solve(ch, cfg, RelaySubset::full(cfg.relay_count), opts);
  }
}

}  // namespace relaycoex
