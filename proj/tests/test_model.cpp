#include "doctest.h"

#include <cmath>
#include <complex>

#include "relaycoex/model.hpp"

using namespace relaycoex;

TEST_SUITE("model") {

TEST_CASE("decibel conversions") {
  CHECK(db_to_linear(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(db_to_linear(10.0) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(db_to_linear(20.0) == doctest::Approx(100.0).epsilon(1e-15));
  CHECK(db_to_linear(3.0) == doctest::Approx(1.9952623149688795).epsilon(1e-15));
  CHECK(db_to_linear(-10.0) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(linear_to_db(100.0) == doctest::Approx(20.0).epsilon(1e-15));
  CHECK(linear_to_db(db_to_linear(7.3)) == doctest::Approx(7.3).epsilon(1e-12));
  CHECK_THROWS_AS(linear_to_db(0.0), std::domain_error);
  CHECK_THROWS_AS(linear_to_db(-1.0), std::domain_error);
}

TEST_CASE("default scenario") {
  const ScenarioConfig cfg = ScenarioConfig::defaults(3);
  CHECK(cfg.relay_count == 3);
  CHECK(cfg.zeta == std::vector<double>{0.01, 0.01, 0.01});
  CHECK(cfg.p_r_max == std::vector<double>{100.0, 100.0, 100.0});
  CHECK(cfg.noise_power_relay == std::vector<double>{1.0, 1.0, 1.0});
  CHECK(cfg.p_s_max == 100.0);
  CHECK(cfg.i_bar == 1.0);
  CHECK(cfg.var_sd == 0.1);
  CHECK(cfg.var_rr.lo == 0.5);
  CHECK(cfg.var_rr.hi == 1.0);
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("scenario validation rejects bad fields") {
  ScenarioConfig cfg = ScenarioConfig::defaults(2);
  SUBCASE("zero relays") {
    cfg.relay_count = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
  SUBCASE("vector size mismatch") {
    cfg.zeta.push_back(0.01);
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
  SUBCASE("nonpositive noise") {
    cfg.noise_power_relay[0] = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
  SUBCASE("negative self interference quality") {
    cfg.zeta[1] = -0.1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
  SUBCASE("nonpositive caps") {
    cfg.p_s_max = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
  SUBCASE("bad variance interval") {
    cfg.var_rr = {1.0, 0.5};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
  SUBCASE("nonpositive interference limit") {
    cfg.i_bar = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
}

TEST_CASE("channel generation is deterministic in the seed") {
  const ScenarioConfig cfg = ScenarioConfig::defaults(3);
  const ChannelRealization a = generate_channels(cfg, 42);
  const ChannelRealization b = generate_channels(cfg, 42);
  const ChannelRealization c = generate_channels(cfg, 43);
  CHECK(a.h_sr == b.h_sr);
  CHECK(a.h_rd == b.h_rd);
  CHECK(a.h_rr == b.h_rr);
  CHECK(a.h_rp == b.h_rp);
  CHECK(a.h_sd == b.h_sd);
  CHECK(a.h_sp == b.h_sp);
  CHECK(a.h_sr != c.h_sr);
  CHECK(a.relay_count() == 3);
  CHECK(a.h_rr.size() == 9);
}

TEST_CASE("degenerate variances give exact zero links") {
  ScenarioConfig cfg = ScenarioConfig::defaults(2);
  cfg.var_sd = 0.0;
  cfg.var_sr = 0.0;
  cfg.var_sp = {0.0, 0.0};
  const ChannelRealization ch = generate_channels(cfg, 5);
  CHECK(ch.h_sd == cxd(0.0, 0.0));
  CHECK(ch.h_sp == cxd(0.0, 0.0));
  CHECK(ch.h_sr[0] == cxd(0.0, 0.0));
  CHECK(ch.h_sr[1] == cxd(0.0, 0.0));
  CHECK(std::abs(ch.h_rd[0]) > 0.0);
  CHECK(std::abs(ch.h_rr[0]) > 0.0);
}

TEST_CASE("sample second moments match the configured variances") {
  const ScenarioConfig cfg = ScenarioConfig::defaults(1);
  const int n = 100000;
  double m_sr = 0.0;
  double m_rd = 0.0;
  double m_sd = 0.0;
  for (int s = 0; s < n; ++s) {
    const ChannelRealization ch = generate_channels(cfg, static_cast<std::uint64_t>(s));
    m_sr += std::norm(ch.h_sr[0]);
    m_rd += std::norm(ch.h_rd[0]);
    m_sd += std::norm(ch.h_sd);
  }
  m_sr /= n;
  m_rd /= n;
  m_sd /= n;
  CHECK(m_sr == doctest::Approx(cfg.var_sr).epsilon(0.02));
  CHECK(m_rd == doctest::Approx(cfg.var_rd).epsilon(0.02));
  CHECK(m_sd == doctest::Approx(cfg.var_sd).epsilon(0.02));
}

TEST_CASE("cross relay magnitudes stay inside the variance interval on average") {
  ScenarioConfig cfg = ScenarioConfig::defaults(2);
  const int n = 20000;
  double m_rr = 0.0;
  for (int s = 0; s < n; ++s) {
    const ChannelRealization ch = generate_channels(cfg, static_cast<std::uint64_t>(s));
    m_rr += std::norm(ch.rr(0, 1));
  }
  m_rr /= n;
  // Variance drawn uniformly from [0.5, 1], so the mean power is 0.75.
  CHECK(m_rr == doctest::Approx(0.75).epsilon(0.03));
}

TEST_CASE("relay subsets") {
  const RelaySubset s = RelaySubset::of({3, 1});
  CHECK(s.indices == std::vector<int>{1, 3});
  CHECK(s.size() == 2);
  CHECK(s.contains(3));
  CHECK_FALSE(s.contains(2));
  CHECK_NOTHROW(s.validate(3));
  CHECK_THROWS_AS(s.validate(2), std::invalid_argument);
  CHECK_THROWS_AS(RelaySubset::of({}).validate(2), std::invalid_argument);
  CHECK_THROWS_AS(RelaySubset::of({1, 1}).validate(2), std::invalid_argument);
  CHECK(RelaySubset::full(4).indices == std::vector<int>{1, 2, 3, 4});
}

TEST_CASE("allocation validation") {
  const ScenarioConfig cfg = ScenarioConfig::defaults(2);
  const RelaySubset subset = RelaySubset::of({1, 2});
  PowerAllocation alloc;
  alloc.p_s = 50.0;
  alloc.p_r[1] = 10.0;
  alloc.p_r[2] = 100.0;
  CHECK_NOTHROW(validate_allocation(cfg, subset, alloc));
  CHECK(alloc.relay_power(2) == 100.0);
  CHECK_THROWS_AS(alloc.relay_power(3), std::invalid_argument);
  SUBCASE("source power above the cap") {
    alloc.p_s = 100.5;
    CHECK_THROWS_AS(validate_allocation(cfg, subset, alloc), std::invalid_argument);
  }
  SUBCASE("relay power above the cap") {
    alloc.p_r[2] = 100.5;
    CHECK_THROWS_AS(validate_allocation(cfg, subset, alloc), std::invalid_argument);
  }
  SUBCASE("allocation domain mismatch") {
    alloc.p_r.erase(2);
    CHECK_THROWS_AS(validate_allocation(cfg, subset, alloc), std::invalid_argument);
  }
}

TEST_CASE("scenario json parsing") {
  const char* text = R"({
    "relay_count": 2,
    "zeta": [0.01, 0.02],
    "p_s_max_db": 20,
    "p_r_max_db": 20,
    "i_bar_db": 0,
    "var_rr": [0.5, 1.0],
    "var_sp": 0.9,
    "_comment": "ignored",
    "sweep": {"parameter": "i_bar_db"}
  })";
  const ScenarioConfig cfg = scenario_from_json(text);
  CHECK(cfg.relay_count == 2);
  CHECK(cfg.zeta == std::vector<double>{0.01, 0.02});
  CHECK(cfg.p_s_max == doctest::Approx(100.0).epsilon(1e-15));
  CHECK(cfg.p_r_max[0] == doctest::Approx(100.0).epsilon(1e-15));
  CHECK(cfg.i_bar == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cfg.var_sp.lo == 0.9);
  CHECK(cfg.var_sp.hi == 0.9);
  CHECK(cfg.var_sd == 0.1);  // untouched default
}

TEST_CASE("scenario json rejects malformed input") {
  CHECK_THROWS_AS(scenario_from_json(R"({"relay_count": 2, "bogus": 1})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      scenario_from_json(R"({"relay_count": 2, "p_s_max": 10, "p_s_max_db": 10})"),
      std::invalid_argument);
  CHECK_THROWS_AS(scenario_from_json(R"({"relay_count": 2, "zeta": [0.1, 0.1, 0.1]})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(scenario_from_json(R"({"relay_count": 0})"), std::invalid_argument);
  CHECK_THROWS_AS(scenario_from_json("not json"), std::invalid_argument);
}

TEST_CASE("scenario json round trip") {
  ScenarioConfig cfg = ScenarioConfig::defaults(3);
  cfg.zeta = {0.001, 0.01, 0.1};
  cfg.i_bar = 2.5;
  cfg.var_rp = {0.7, 0.95};
  const ScenarioConfig back = scenario_from_json(scenario_to_json(cfg));
  CHECK(back.relay_count == cfg.relay_count);
  CHECK(back.zeta == cfg.zeta);
  CHECK(back.i_bar == doctest::Approx(cfg.i_bar).epsilon(1e-15));
  CHECK(back.var_rp.lo == doctest::Approx(cfg.var_rp.lo).epsilon(1e-15));
  CHECK(back.var_rp.hi == doctest::Approx(cfg.var_rp.hi).epsilon(1e-15));
  CHECK(back.p_s_max == doctest::Approx(cfg.p_s_max).epsilon(1e-15));
}

}  // TEST_SUITE
