#include "noma/channel.hpp"

#include "support/oracles.hpp"

#include <doctest.h>

#include <sstream>

using namespace noma;

TEST_CASE("pathloss") {
  CHECK(pathloss_db(100) == doctest::Approx(90.5));
  CHECK(pathloss_db(1000) == doctest::Approx(128.1));
  CHECK(pathloss_db(20) == doctest::Approx(64.2167).epsilon(1e-4));
  CHECK_THROWS_AS(pathloss_db(0), InvalidArgument);
  CHECK_THROWS_AS(pathloss_db(-5), InvalidArgument);
}

TEST_CASE("link budget") {
  ChannelParams p;
  CHECK(noise_power_dbm(p) == doctest::Approx(-95.0));
  CHECK(derive_tx_power_budget(p) == doctest::Approx(5.5));
  ChannelParams flat;
  flat.target_snr = 0;
  flat.pathloss_intercept = 0;
  flat.pathloss_slope = 0;
  CHECK(derive_tx_power_budget(flat) == doctest::Approx(noise_power_dbm(flat)));
  flat.tx_power_max = 3.0;
  CHECK(tx_power_budget_dbm(flat) == 3.0);
}

TEST_CASE("parameter validation") {
  ChannelParams p;
  p.cell_inner_radius = 200;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p = {};
  p.bandwidth = 0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p = {};
  p.max_rate = 0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
}

TEST_CASE("deterministic gain") {
  ChannelParams p;
  p.shadowing_sigma = 0;
  p.fading = false;
  Rng rng(3);
  CHECK(sample_channel_gain(1000, p, rng) == doctest::Approx(std::pow(10.0, -12.81)).epsilon(1e-12));
}

TEST_CASE("fading and shadowing statistics") {
  const int draws = 1'000'000;
  Rng rng(5);
  ChannelParams fade_only;
  fade_only.shadowing_sigma = 0;
  const double base = std::pow(10.0, -pathloss_db(1000, fade_only) / 10.0);
  double mean = 0;
  for (int k = 0; k < draws; ++k) mean += sample_channel_gain(1000, fade_only, rng) / base;
  CHECK(mean / draws == doctest::Approx(1.0).epsilon(0.01));

  ChannelParams shadow_only;
  shadow_only.fading = false;
  double s1 = 0, s2 = 0;
  for (int k = 0; k < draws; ++k) {
    double x = -10.0 * std::log10(sample_channel_gain(1000, shadow_only, rng)) - pathloss_db(1000, shadow_only);
    s1 += x;
    s2 += x * x;
  }
  const double sd = std::sqrt(s2 / draws - (s1 / draws) * (s1 / draws));
  CHECK(std::abs(sd - 8.0) <= 0.05);
}

TEST_CASE("SIC interference sets") {
  std::vector<double> two{1.0, 4.0};
  auto sets = sic_interference_sets(two);
  CHECK(sets[0] == std::vector<std::size_t>{1});
  CHECK(sets[1].empty());

  std::vector<double> one{2.0};
  CHECK(sic_interference_sets(one)[0].empty());

  std::vector<double> three{3.0, 1.0, 2.0};
  sets = sic_interference_sets(three);
  CHECK(sets[0].empty());
  CHECK(sets[1] == std::vector<std::size_t>{0, 2});
  CHECK(sets[2] == std::vector<std::size_t>{0});

  // equal gains: lower index counts as stronger
  std::vector<double> tie{2.0, 2.0};
  sets = sic_interference_sets(tie);
  CHECK(sets[0].empty());
  CHECK(sets[1] == std::vector<std::size_t>{0});
}

TEST_CASE("SINR") {
  std::vector<double> p1{1.0}, g1{1.0};
  CHECK(sinr(0, p1, g1, 1.0) == 1.0);

  std::vector<double> p{2.0, 1.0}, g{1.0, 4.0};
  CHECK(sinr(0, p, g, 1.0) == doctest::Approx(0.4));
  CHECK(sinr(1, p, g, 1.0) == doctest::Approx(4.0));
  // physical variant weights the interferer by the receiver's gain
  CHECK(sinr(0, p, g, 1.0, true) == doctest::Approx(2.0 / (1.0 + 1.0)));

  std::vector<double> zero{0.0, 1.0};
  CHECK(sinr(0, zero, g, 1.0) == 0.0);
  CHECK_THROWS_AS(sinr(0, p, g, 0.0), InvalidArgument);
}

TEST_CASE("rate models") {
  CHECK(rate(1.0, ShannonRate{}) == doctest::Approx(1.0));
  CHECK(rate(1023.0, TruncatedRate{6.0}) == doctest::Approx(6.0));
  CHECK(rate(3.0, TruncatedRate{6.0}) == doctest::Approx(2.0));
  StaircaseRate s{{1.0, 3.0}, {1.0, 2.0}};
  CHECK(rate(2.5, s) == 1.0);
  CHECK(rate(0.5, s) == 0.0);
  CHECK(rate(3.0, s) == 2.0);
  CHECK_THROWS_AS(rate(1.0, StaircaseRate{}), InvalidArgument);
  CHECK(max_rate(TruncatedRate{6.0}) == 6.0);
  CHECK_FALSE(max_rate(ShannonRate{}).has_value());

  std::istringstream table("# dB, rate\n0 1\n(10, 3)\n");
  auto read = read_staircase(table);
  REQUIRE(read.thresholds.size() == 2);
  CHECK(read.thresholds[1] == doctest::Approx(10.0));
  CHECK(read.rates[1] == 3.0);
  std::istringstream bad("5 1\n3 2\n");
  CHECK_THROWS_AS(read_staircase(bad), InvalidArgument);
  std::istringstream empty("# nothing\n");
  CHECK_THROWS_AS(read_staircase(empty), InvalidArgument);
}

TEST_CASE("max-min allocation, singleton") {
  std::vector<double> g{0.5};
  auto a = maxmin_power_allocation(g, 4.0, 2.0);
  CHECK(a.powers[0] == 4.0);
  CHECK(a.common_rate == doctest::Approx(std::log2(1.0 + 4.0 * 0.5 / 2.0)));
}

TEST_CASE("max-min allocation, closed-form pair") {
  std::vector<double> g{1.0, 4.0};
  const double s = testing::two_user_equal_sinr(1.0, 4.0, 3.0, 1.0);
  CHECK(s == doctest::Approx((-1.25 + std::sqrt(13.5625)) / 2));
  auto a = maxmin_power_allocation(g, 3.0, 1.0);
  CHECK(a.powers[1] == doctest::Approx(s / 4).epsilon(1e-8));
  CHECK(a.powers[0] == doctest::Approx(s * (s + 1)).epsilon(1e-8));
  CHECK(std::exp2(a.common_rate) - 1 == doctest::Approx(s).epsilon(1e-8));
  const double sum_rate = virtual_user_rate(a.powers, g, 1.0, ShannonRate{});
  CHECK(sum_rate == doctest::Approx(2 * std::log2(1 + s)).epsilon(1e-8));
  CHECK(sum_rate == doctest::Approx(2.296).epsilon(1e-3));

  // bracket choice does not move the answer
  BisectionOptions wide;
  wide.rate_bracket = 40.0;
  auto b = maxmin_power_allocation(g, 3.0, 1.0, wide);
  CHECK(std::abs(b.common_rate - a.common_rate) <= 2e-9);
}

TEST_CASE("max-min allocation, vanishing budget") {
  std::vector<double> g{1.0, 4.0, 2.0};
  auto a = maxmin_power_allocation(g, 1e-12, 1.0);
  CHECK(a.common_rate < 1e-9);
  for (double p : a.powers) CHECK(p < 1e-11);
  CHECK_THROWS_AS(maxmin_power_allocation(g, 0.0, 1.0), InvalidArgument);
  std::vector<double> bad{1.0, -1.0};
  CHECK_THROWS_AS(maxmin_power_allocation(bad, 1.0, 1.0), InvalidArgument);
}

TEST_CASE("required power grows with the target") {
  std::vector<double> g{0.3, 2.0, 1.1};
  auto order = sic_order(g);
  std::vector<double> scratch(3);
  double prev = -1;
  for (double s = 0.1; s < 20; s *= 1.5) {
    double p = required_power(s, g, 0.7, order, scratch);
    CHECK(p > prev);
    prev = p;
  }
}

TEST_CASE("rates degrade with interferer power") {
  std::vector<double> g{0.5, 2.0, 1.0};
  std::vector<double> p{1.0, 1.0, 1.0};
  const double weakest = sinr(0, p, g, 0.1);
  const double middle = sinr(2, p, g, 0.1);
  p[1] = 2.0;
  CHECK(sinr(0, p, g, 0.1) < weakest);
  CHECK(sinr(2, p, g, 0.1) < middle);
}
