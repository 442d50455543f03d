#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>

#include "relaycoex/rate.hpp"

using namespace relaycoex;

namespace {

// All-ones channel matrix; tests tweak individual entries.
ChannelRealization ones_channels(int k) {
  ChannelRealization ch;
  const auto n = static_cast<size_t>(k);
  ch.h_sr.assign(n, cxd(1.0, 0.0));
  ch.h_rd.assign(n, cxd(1.0, 0.0));
  ch.h_rp.assign(n, cxd(1.0, 0.0));
  ch.h_rr.assign(n * n, cxd(1.0, 0.0));
  ch.h_sd = cxd(1.0, 0.0);
  ch.h_sp = cxd(1.0, 0.0);
  return ch;
}

PowerAllocation alloc_of(double p_s, std::vector<std::pair<int, double>> pr) {
  PowerAllocation a;
  a.p_s = p_s;
  for (auto& [k, p] : pr) a.p_r[k] = p;
  return a;
}

// Independent transcription of the rate expression, naive form.
double rate_oracle(const ChannelRealization& ch, const ScenarioConfig& cfg,
                   const RelaySubset& subset, const PowerAllocation& alloc) {
  double inner = 0.0;
  for (int k : subset.indices) {
    const auto uk = static_cast<size_t>(k - 1);
    const double a = alloc.relay_power(k) * std::norm(ch.h_rd[uk]) / cfg.noise_power_dest;
    double den = cfg.noise_power_relay[uk];
    for (int j : subset.indices) {
      const auto uj = static_cast<size_t>(j - 1);
      den += cfg.zeta[uj] * alloc.relay_power(j) * std::norm(ch.rr(j - 1, k - 1));
    }
    const double b = alloc.p_s * std::norm(ch.h_sr[uk]) / den;
    inner += a * b / (1.0 + a + b);
  }
  return std::log2(1.0 + inner);
}

PowerAllocation random_alloc(const ScenarioConfig& cfg, const RelaySubset& subset,
                             std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PowerAllocation a;
  a.p_s = u(rng) * cfg.p_s_max;
  for (int k : subset.indices) {
    a.p_r[k] = u(rng) * cfg.p_r_max[static_cast<size_t>(k - 1)];
  }
  return a;
}

}  // namespace

TEST_SUITE("rate") {

TEST_CASE("amplification gain on constructed points") {
  SUBCASE("unit gain") {
    // Receive power 0.25 + 0.25 + 0.5 = 1.
    ScenarioConfig cfg = ScenarioConfig::defaults(1);
    cfg.set_zeta(1.0);
    cfg.set_noise_power_relay(0.5);
    ChannelRealization ch = ones_channels(1);
    ch.h_sr[0] = cxd(0.5, 0.0);
    ch.h_rr[0] = cxd(0.5, 0.0);
    const auto alloc = alloc_of(1.0, {{1, 1.0}});
    CHECK(amplification_gain(ch, cfg, RelaySubset::of({1}), alloc, 1) ==
          doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("gain one half") {
    // Receive power 2 + 1 + 1 = 4.
    ScenarioConfig cfg = ScenarioConfig::defaults(1);
    cfg.set_zeta(0.5);
    cfg.set_noise_power_relay(1.0);
    const ChannelRealization ch = ones_channels(1);
    const auto alloc = alloc_of(2.0, {{1, 2.0}});
    CHECK(amplification_gain(ch, cfg, RelaySubset::of({1}), alloc, 1) ==
          doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("relay outside the subset") {
    const ScenarioConfig cfg = ScenarioConfig::defaults(2);
    const ChannelRealization ch = ones_channels(2);
    const auto alloc = alloc_of(1.0, {{1, 1.0}});
    CHECK_THROWS_AS(amplification_gain(ch, cfg, RelaySubset::of({1}), alloc, 2),
                    std::invalid_argument);
  }
}

TEST_CASE("gain normalizes the relay receive power") {
  const ScenarioConfig cfg = ScenarioConfig::defaults(3);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const ChannelRealization ch = generate_channels(cfg, 100 + trial);
    const RelaySubset subset = RelaySubset::full(3);
    const PowerAllocation alloc = random_alloc(cfg, subset, rng);
    for (int k : subset.indices) {
      const double g = amplification_gain(ch, cfg, subset, alloc, k);
      double recv = alloc.p_s * std::norm(ch.h_sr[static_cast<size_t>(k - 1)]) +
                    cfg.noise_power_relay[static_cast<size_t>(k - 1)];
      for (int j : subset.indices) {
        recv += cfg.zeta[static_cast<size_t>(j - 1)] * alloc.relay_power(j) *
                std::norm(ch.rr(j - 1, k - 1));
      }
      CHECK(g * g * recv == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("closed form values on constructed points") {
  // a = 1 and b = 1 give a summand of 1/3.
  ScenarioConfig cfg = ScenarioConfig::defaults(1);
  cfg.set_zeta(0.5);
  cfg.set_noise_power_relay(0.5);
  const ChannelRealization ch = ones_channels(1);
  const auto alloc = alloc_of(1.0, {{1, 1.0}});
  const RateBreakdown bd = achievable_rate(ch, cfg, RelaySubset::of({1}), alloc);
  CHECK(bd.per_relay_sinr_term.at(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(bd.total_rate == doctest::Approx(std::log2(4.0 / 3.0)).epsilon(1e-14));
}

TEST_CASE("rate matches an independent transcription") {
  const ScenarioConfig cfg = ScenarioConfig::defaults(2);
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const ChannelRealization ch = generate_channels(cfg, 500 + trial);
    const RelaySubset subset = trial % 3 == 0 ? RelaySubset::of({2}) : RelaySubset::full(2);
    const PowerAllocation alloc = random_alloc(cfg, subset, rng);
    const double expected = rate_oracle(ch, cfg, subset, alloc);
    const double got = achievable_rate(ch, cfg, subset, alloc).total_rate;
    CHECK(got == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("zero powers give zero rate") {
  const ScenarioConfig cfg = ScenarioConfig::defaults(2);
  const ChannelRealization ch = generate_channels(cfg, 3);
  const RelaySubset subset = RelaySubset::full(2);
  CHECK(achievable_rate(ch, cfg, subset, alloc_of(0.0, {{1, 10.0}, {2, 10.0}})).total_rate ==
        0.0);
  CHECK(achievable_rate(ch, cfg, subset, alloc_of(10.0, {{1, 0.0}, {2, 0.0}})).total_rate ==
        0.0);
}

TEST_CASE("relays outside the subset do not matter") {
  const ScenarioConfig cfg = ScenarioConfig::defaults(2);
  ChannelRealization ch = generate_channels(cfg, 9);
  const RelaySubset subset = RelaySubset::of({1});
  const auto alloc = alloc_of(50.0, {{1, 30.0}});
  const double before = achievable_rate(ch, cfg, subset, alloc).total_rate;
  ch.h_rr[1 * 2 + 0] = cxd(100.0, -50.0);  // relay 2 into relay 1
  ch.h_sr[1] = cxd(9.0, 9.0);
  ch.h_rd[1] = cxd(-7.0, 2.0);
  const double after = achievable_rate(ch, cfg, subset, alloc).total_rate;
  CHECK(before == after);
}

TEST_CASE("rate is nondecreasing in the source power") {
  const ScenarioConfig cfg = ScenarioConfig::defaults(2);
  const ChannelRealization ch = generate_channels(cfg, 17);
  const RelaySubset subset = RelaySubset::full(2);
  double prev = -1.0;
  for (int i = 0; i <= 20; ++i) {
    const auto alloc = alloc_of(cfg.p_s_max * i / 20.0, {{1, 40.0}, {2, 60.0}});
    const double r = achievable_rate(ch, cfg, subset, alloc).total_rate;
    CHECK(r >= prev);
    prev = r;
  }
}

TEST_CASE("stronger residual self interference degrades the rate") {
  ScenarioConfig cfg = ScenarioConfig::defaults(2);
  const ChannelRealization ch = generate_channels(cfg, 23);
  const RelaySubset subset = RelaySubset::full(2);
  const auto alloc = alloc_of(100.0, {{1, 100.0}, {2, 100.0}});
  double prev = 1e300;
  for (double z : {0.001, 0.01, 0.1, 1.0}) {
    cfg.set_zeta(z);
    const double r = achievable_rate(ch, cfg, subset, alloc).total_rate;
    CHECK(r < prev);
    prev = r;
  }
}

TEST_CASE("surrogate objective tracks the exact inner sum at high loop power") {
  ScenarioConfig cfg = ScenarioConfig::defaults(2);
  cfg.set_zeta(10.0);
  const ChannelRealization ch = ones_channels(2);
  const RelaySubset subset = RelaySubset::full(2);
  const auto alloc = alloc_of(100.0, {{1, 100.0}, {2, 100.0}});
  const double simplified = simplified_rate_objective(ch, cfg, subset, alloc);
  // Exact inner sum via the public breakdown.
  const RateBreakdown bd = achievable_rate(ch, cfg, subset, alloc);
  double exact = 0.0;
  for (const auto& [k, v] : bd.per_relay_sinr_term) exact += v;
  CHECK(simplified == doctest::Approx(exact).epsilon(1e-3));
  CHECK(simplified != exact);  // the relay noise term is genuinely dropped
}

TEST_CASE("surrogate rejects vanishing loop power") {
  ScenarioConfig cfg = ScenarioConfig::defaults(1);
  cfg.set_zeta(0.0);
  const ChannelRealization ch = ones_channels(1);
  CHECK_THROWS_AS(
      simplified_rate_objective(ch, cfg, RelaySubset::of({1}), alloc_of(1.0, {{1, 1.0}})),
      std::domain_error);
}

TEST_CASE("surrogate argmax is near the exact argmax on a grid") {
  ScenarioConfig cfg = ScenarioConfig::defaults(1);
  cfg.set_zeta(0.5);
  const ChannelRealization ch = generate_channels(cfg, 31);
  const RelaySubset subset = RelaySubset::of({1});
  const int g = 21;
  double best_exact = -1.0;
  double exact_at_surrogate_argmax = -1.0;
  double best_surr = -1.0;
  for (int i = 0; i <= g; ++i) {
    for (int j = 1; j <= g; ++j) {  // surrogate needs nonzero relay power
      const auto alloc =
          alloc_of(cfg.p_s_max * i / g, {{1, cfg.p_r_max[0] * j / g}});
      const double ex = achievable_rate(ch, cfg, subset, alloc).total_rate;
      const double su = simplified_rate_objective(ch, cfg, subset, alloc);
      if (ex > best_exact) best_exact = ex;
      if (su > best_surr) {
        best_surr = su;
        exact_at_surrogate_argmax = ex;
      }
    }
  }
  CHECK(exact_at_surrogate_argmax >= 0.995 * best_exact);
}

TEST_CASE("log map preserves the argmax of the inner sum") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> u(0.0, 50.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double x = u(rng);
    const double y = u(rng);
    CHECK((x < y) == (std::log2(1.0 + x) < std::log2(1.0 + y)));
  }
}

}  // TEST_SUITE
