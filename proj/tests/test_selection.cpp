#include "doctest.h"

#include <stdexcept>
#include <vector>

#include "relaycoex/rate.hpp"
#include "relaycoex/selection.hpp"

using namespace relaycoex;

TEST_SUITE("selection") {

TEST_CASE("subset enumeration is ordered and complete") {
  const std::vector<RelaySubset> subsets = enumerate_subsets(3);
  REQUIRE(subsets.size() == 7);
  const std::vector<std::vector<int>> expected = {
      {1}, {2}, {3}, {1, 2}, {1, 3}, {2, 3}, {1, 2, 3}};
  for (size_t i = 0; i < expected.size(); ++i) {
    CHECK(subsets[i].indices == expected[i]);
  }
  CHECK(enumerate_subsets(1).size() == 1);
  CHECK(enumerate_subsets(4).size() == 15);
  CHECK(enumerate_subsets(10).size() == 1023);
  CHECK_THROWS_AS(enumerate_subsets(0), std::invalid_argument);
  CHECK_THROWS_AS(enumerate_subsets(11), std::invalid_argument);
}

TEST_CASE("policy names round trip") {
  for (SelectionPolicy p :
       {SelectionPolicy::full, SelectionPolicy::mrs, SelectionPolicy::srs}) {
    CHECK(selection_from_string(to_string(p)) == p);
  }
  CHECK_THROWS_AS(selection_from_string("bogus"), std::invalid_argument);
}

TEST_CASE("one relay leaves nothing to choose") {
  ScenarioConfig cfg = ScenarioConfig::defaults(1);
  cfg.i_bar = 1.0;
  const ChannelRealization ch = generate_channels(cfg, 31);
  const SolverOptions opts = SolverOptions::make(Mode::noncoherent, Schedule::greedy1);
  const SolveResult full = solve_selected(ch, cfg, SelectionPolicy::full, opts);
  const SolveResult mrs = solve_selected(ch, cfg, SelectionPolicy::mrs, opts);
  const SolveResult srs = solve_selected(ch, cfg, SelectionPolicy::srs, opts);
  CHECK(full.subset.indices == std::vector<int>{1});
  CHECK(mrs.subset.indices == std::vector<int>{1});
  CHECK(srs.subset.indices == std::vector<int>{1});
  CHECK(mrs.rate == full.rate);
  CHECK(srs.rate == full.rate);
}

TEST_CASE("the multi relay search matches exhaustive enumeration") {
  ScenarioConfig cfg = ScenarioConfig::defaults(3);
  cfg.i_bar = 1.0;
  const SolverOptions opts = SolverOptions::make(Mode::noncoherent, Schedule::greedy1);
  for (int seed = 0; seed < 8; ++seed) {
    const ChannelRealization ch = generate_channels(cfg, 8200 + seed);
    const SolveResult picked = select_multi(ch, cfg, opts);
    double best_rate = -1.0;
    std::vector<int> best_indices;
    for (const RelaySubset& s : enumerate_subsets(3)) {
      const double r = solve(ch, cfg, s, opts).rate;
      if (r > best_rate) {
        best_rate = r;
        best_indices = s.indices;
      }
    }
    CHECK(picked.rate == best_rate);
    CHECK(picked.subset.indices == best_indices);
  }
}

TEST_CASE("the multi relay search never trails the single relay search") {
  // The single relay candidates are a subset of the multi relay candidates,
  // so the best over the larger pool can only match or beat the smaller one.
  ScenarioConfig cfg = ScenarioConfig::defaults(3);
  cfg.i_bar = 1.0;
  const SolverOptions opts = SolverOptions::make(Mode::noncoherent, Schedule::greedy1);
  for (int seed = 0; seed < 30; ++seed) {
    const ChannelRealization ch = generate_channels(cfg, 8400 + seed);
    const SolveResult mrs = select_multi(ch, cfg, opts);
    const SolveResult srs = select_single(ch, cfg, opts);
    CHECK(srs.subset.size() == 1);
    CHECK(mrs.rate >= srs.rate);
    const SolveResult full = solve_selected(ch, cfg, SelectionPolicy::full, opts);
    CHECK(mrs.rate >= full.rate);
  }
}

TEST_CASE("a relay with no usable links is worthless to every policy") {
  ScenarioConfig cfg = ScenarioConfig::defaults(2);
  cfg.i_bar = 1.0;
  ChannelRealization ch;
  ch.h_sr = {cxd(1.0, 0.2), cxd(0.0, 0.0)};
  ch.h_rd = {cxd(0.9, -0.1), cxd(0.0, 0.0)};
  ch.h_rp = {cxd(0.3, 0.1), cxd(0.2, -0.2)};
  ch.h_rr = {cxd(0.1, 0.0), cxd(0.05, 0.02), cxd(0.03, -0.01), cxd(0.1, 0.0)};
  ch.h_sd = cxd(0.1, 0.0);
  ch.h_sp = cxd(0.4, 0.1);

  const SolverOptions opts = SolverOptions::make(Mode::noncoherent, Schedule::greedy1);
  const SolveResult srs = select_single(ch, cfg, opts);
  CHECK(srs.subset.indices == std::vector<int>{1});
  CHECK(srs.rate > 0.0);

  const SolveResult mrs = select_multi(ch, cfg, opts);
  CHECK(mrs.rate >= srs.rate);
  // If the dead relay sneaks into the winning subset it must contribute
  // exactly nothing to the rate.
  const RateBreakdown bd = achievable_rate(ch, cfg, mrs.subset, mrs.allocation);
  if (mrs.subset.contains(2)) {
    CHECK(bd.per_relay_sinr_term.at(2) == 0.0);
  }
}

TEST_CASE("selection respects the solver schedule it is given") {
  ScenarioConfig cfg = ScenarioConfig::defaults(2);
  cfg.i_bar = 1.0;
  const ChannelRealization ch = generate_channels(cfg, 8600);
  SolverOptions opts = SolverOptions::make(Mode::noncoherent, Schedule::grid_oracle);
  opts.grid_points = 21;
  const SolveResult full = solve_selected(ch, cfg, SelectionPolicy::full, opts);
  const SolveResult mrs = solve_selected(ch, cfg, SelectionPolicy::mrs, opts);
  CHECK(full.subset.indices == std::vector<int>{1, 2});
  CHECK(mrs.rate >= full.rate);
  CHECK(mrs.interference <= cfg.i_bar + 1e-9);
  CHECK_NOTHROW(validate_allocation(cfg, mrs.subset, mrs.allocation));
}

}  // TEST_SUITE
