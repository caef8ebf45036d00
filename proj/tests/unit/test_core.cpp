#include "noma/core.hpp"
#include "noma/trace.hpp"

#include <doctest.h>

using namespace noma;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

}  // namespace

TEST_CASE("rational parsing") {
  CHECK(parse_rational("1/2") == Rational(1, 2));
  CHECK(parse_rational("0.9") == Rational(9, 10));
  CHECK(parse_rational("007") == Rational(7));
  CHECK(parse_rational("-3e-2") == Rational(-3, 100));
  CHECK(parse_rational("1.25e1") == Rational(25, 2));
  CHECK(to_string(Rational(45, 160)) == "9/32");
  CHECK(to_rational(0.1) == Rational(1, 10));
  CHECK_THROWS(parse_rational("1/0"));
  CHECK_THROWS(parse_rational("abc"));
  CHECK_THROWS(parse_rational("."));
}

TEST_CASE("virtual user rendering") {
  VirtualUser v{3, 1};
  CHECK(v.to_string() == "{1,3}");
  CHECK(VirtualUser::parse("{3, 1}") == v);
  CHECK(v.contains(3));
  CHECK_FALSE(v.contains(2));
  CHECK_THROWS_AS(VirtualUser::parse("{1,1}"), InvalidArgument);
  CHECK_THROWS_AS(VirtualUser::parse("{}"), InvalidArgument);
}

TEST_CASE("enumerate_virtual_users") {
  auto f = enumerate_virtual_users(2, 2);
  REQUIRE(f.size() == 3);
  CHECK(f[0] == VirtualUser{1});
  CHECK(f[1] == VirtualUser{2});
  CHECK(f[2] == (VirtualUser{1, 2}));

  auto g = enumerate_virtual_users(3, 2);
  std::vector<std::string> names;
  for (const auto& v : g) names.push_back(v.to_string());
  CHECK(names == std::vector<std::string>{"{1}", "{2}", "{3}", "{1,2}", "{1,3}", "{2,3}"});

  auto oma = enumerate_virtual_users(5, 1);
  CHECK(oma.size() == 5);
  CHECK(oma.max_member_size() == 1);

  // sum_k C(6, k), k <= 3
  CHECK(enumerate_virtual_users(6, 3).size() == 6 + 15 + 20);

  CHECK_THROWS_AS(enumerate_virtual_users(3, 0), InvalidArgument);
  CHECK_THROWS_AS(enumerate_virtual_users(3, 4), InvalidArgument);
  CHECK(enumerate_virtual_users(4, 2) == enumerate_virtual_users(4, 2));
}

TEST_CASE("family validation") {
  CHECK_THROWS_AS(VirtualUserFamily(2, {VirtualUser{1}, VirtualUser{3}}), InvalidArgument);
  CHECK_THROWS_AS(VirtualUserFamily(2, {VirtualUser{1}, VirtualUser{1}}), InvalidArgument);
  VirtualUserFamily f(3, {VirtualUser{1, 2}, VirtualUser{3}});
  CHECK(f.singleton_indices() == std::vector<std::size_t>{1});
  Eigen::MatrixXi inc = f.incidence();
  CHECK(inc(0, 0) == 1);
  CHECK(inc(2, 1) == 1);
  CHECK(inc(2, 0) == 0);
}

TEST_CASE("scheduling_measure") {
  auto f = enumerate_virtual_users(2, 2);
  Eigen::VectorXd lambda = vec({0.1, 0});
  Eigen::VectorXd s = scheduling_measure<double>(vec({0.1, 0.3, 0.1}), lambda, f);
  CHECK(s(0) == doctest::Approx(0.2));
  CHECK(s(1) == doctest::Approx(0.3));
  CHECK(s(2) == doctest::Approx(0.2));

  Eigen::VectorXd r = vec({0.2, 0.2, 0.4});
  s = scheduling_measure<double>(r, lambda, f);
  CHECK(s(0) == doctest::Approx(0.3));
  CHECK(s(1) == doctest::Approx(0.2));
  CHECK(s(2) == doctest::Approx(0.5));

  CHECK(scheduling_measure<double>(r, Eigen::VectorXd::Zero(2), f) == r);

  CHECK_THROWS_AS(scheduling_measure<double>(vec({0.1, 0.2}), lambda, f), InvalidArgument);
  CHECK_THROWS_AS(scheduling_measure<double>(r, vec({0.1}), f), InvalidArgument);
}

TEST_CASE("exact argmax keeps ties") {
  VectorQ s(3);
  s << Rational(1, 5), Rational(1, 5), Rational(1, 10);
  CHECK(argmax_set(s) == std::vector<std::size_t>{0, 1});
}

TEST_CASE("update_temporal_shares") {
  auto f = enumerate_virtual_users(2, 2);
  Eigen::VectorXd a = Eigen::VectorXd::Zero(2);
  update_temporal_shares(a, 0, f[0]);
  CHECK(a(0) == 1.0);
  CHECK(a(1) == 0.0);

  Eigen::VectorXd b = vec({0.5, 0.5});
  update_temporal_shares(b, 1, f[1]);
  CHECK(b(0) == doctest::Approx(0.25));

  // Period-10 WRR: three slots {1}, three slots {2}, four slots {1,2}.
  VectorQ q = VectorQ::Zero(2);
  long t = 0;
  for (int period = 0; period < 7; ++period) {
    for (int k = 0; k < 10; ++k, ++t) update_temporal_shares(q, t, f[k < 3 ? 0 : k < 6 ? 1 : 2]);
    CHECK(q(0) == Rational(7, 10));
    CHECK(q(1) == Rational(7, 10));
  }
}

TEST_CASE("running mean equals batch average") {
  auto f = enumerate_virtual_users(3, 2);
  Rng rng(11);
  std::uniform_int_distribution<std::size_t> pick(0, f.size() - 1);

  VectorQ exact = VectorQ::Zero(3);
  std::vector<long> counts(3, 0);
  const long short_run = 2000;
  for (long t = 0; t < short_run; ++t) {
    auto d = pick(rng);
    update_temporal_shares(exact, t, f[d]);
    for (int u : f[d].members()) ++counts[static_cast<std::size_t>(u - 1)];
  }
  for (int i = 0; i < 3; ++i) CHECK(exact(i) == Rational(counts[static_cast<std::size_t>(i)], short_run));

  Eigen::VectorXd approx = Eigen::VectorXd::Zero(3);
  std::vector<long> c2(3, 0);
  const long long_run = 1'000'000;
  for (long t = 0; t < long_run; ++t) {
    auto d = pick(rng);
    update_temporal_shares(approx, t, f[d]);
    for (int u : f[d].members()) ++c2[static_cast<std::size_t>(u - 1)];
  }
  for (int i = 0; i < 3; ++i) {
    const double batch = static_cast<double>(c2[static_cast<std::size_t>(i)]) / long_run;
    CHECK(std::abs(approx(i) - batch) <= 1e-12 * batch);
  }
  // one member per slot, members of size 1 or 2
  CHECK(approx.sum() >= 1.0 - 1e-9);
  CHECK(approx.sum() <= 2.0 + 1e-9);
}

TEST_CASE("demand validation") {
  TemporalDemands ok{vec({0.2, 0.5}), vec({1.0, 0.5})};
  CHECK_NOTHROW(ok.validate());
  CHECK(TemporalDemands::equality(vec({0.3, 0.3})).is_equality());
  TemporalDemands bad{vec({0.6}), vec({0.5})};
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  TemporalDemands out_of_range{vec({-0.1}), vec({0.5})};
  CHECK_THROWS_AS(out_of_range.validate(), InvalidArgument);
}

TEST_CASE("performance bound is enforced") {
  PerformanceSample s{vec({0.5, -2.0}), 1.0};
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
  s.values(1) = std::nan("");
  s.bound = 10;
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
}

TEST_CASE("tie rules") {
  Rng rng(1);
  CHECK_THROWS_AS(break_tie(ErrorOnTie{}, {0, 2}, rng), TieError);
  try {
    break_tie(ErrorOnTie{}, {0, 2}, rng);
  } catch (const TieError& e) {
    CHECK(e.tied() == std::vector<std::size_t>{0, 2});
  }
  CHECK(break_tie(ErrorOnTie{}, {1}, rng) == 1);
  CHECK(break_tie(LowestIndex{}, {1, 2}, rng) == 1);

  StochasticTieBreak st;
  st.weights[{0, 1}] = {Rational(0), Rational(1)};
  for (int k = 0; k < 100; ++k) CHECK(break_tie(st, {0, 1}, rng) == 1);

  StochasticTieBreak bad;
  bad.weights[{0, 1}] = {Rational(1, 2), Rational(1, 3)};
  CHECK_THROWS_AS(validate(bad), InvalidArgument);
  bad.weights[{0, 1}] = {Rational(3, 2), Rational(-1, 2)};
  CHECK_THROWS_AS(validate(bad), InvalidArgument);

  auto uniform = tie_distribution(StochasticTieBreak{}, {0, 1, 2});
  CHECK(uniform == std::vector<Rational>(3, Rational(1, 3)));
}

TEST_CASE("snapshot sampling") {
  CHECK(snapshot_slots(100, 0.1) == std::vector<long>{10, 20, 30, 40, 50, 60, 70, 80, 90, 100});
  CHECK(snapshot_slots(5, 0.5) == std::vector<long>{2, 4});
  CHECK_THROWS_AS(snapshot_slots(10, 0.0), InvalidArgument);
}
