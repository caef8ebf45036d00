#include "noma/oracle.hpp"

#include "support/oracles.hpp"

#include <doctest.h>

#include <sstream>

using namespace noma;

namespace {

VectorQ q(std::initializer_list<const char*> xs) {
  VectorQ v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (const char* x : xs) v(i++) = parse_rational(x);
  return v;
}

}  // namespace

TEST_CASE("instance file parsing") {
  auto file = testing::discrete_instance();
  CHECK(file.instance.family() == enumerate_virtual_users(2, 2));
  CHECK(file.instance.outcome_count() == 8);
  CHECK(file.instance.mean() == q({"3/20", "1/4", "7/40"}));
  REQUIRE(file.demands);
  CHECK(file.demands->lower == q({"1/2", "1/4"}));

  std::ostringstream out;
  write_instance(out, file);
  std::istringstream back(out.str());
  auto again = read_instance(back);
  CHECK(again.instance.mean() == file.instance.mean());
  CHECK(again.demands->upper == file.demands->upper);

  std::istringstream bad_prob("users 1\nmember {1}\n1 1/2\n");
  CHECK_THROWS_AS(read_instance(bad_prob), InvalidArgument);
  std::istringstream missing("users 2\nmember {1}\n1 1\n");
  CHECK_THROWS_AS(read_instance(missing), InvalidArgument);
}

TEST_CASE("joint tables") {
  VirtualUserFamily f(1, {VirtualUser{1}});
  FiniteSupportInstance inst(f, std::vector<JointOutcome>{{q({"2"}), Rational(1, 4)}, {q({"6"}), Rational(3, 4)}});
  CHECK(inst.mean() == q({"5"}));
  CHECK_THROWS_AS(FiniteSupportInstance(f, std::vector<JointOutcome>{{q({"1"}), Rational(1, 2)}}), InvalidArgument);
}

TEST_CASE("exact evaluation at the optimal thresholds") {
  auto file = testing::discrete_instance();
  const VectorQ lambda = q({"1/10", "0"});
  auto eval = exact_tbs_evaluate(file.instance, lambda, testing::optimal_tie_rule());
  CHECK(eval.shares == q({"1/2", "3/4"}));
  CHECK(eval.utility == Rational(45, 160));

  // independent enumeration in test code
  const auto& family = file.instance.family();
  const auto rule = testing::optimal_tie_rule();
  auto ref = testing::enumerate_independent(family, file.instance.marginals(), [&](const VectorQ& r) {
    VectorQ s = r;
    s(0) += lambda(0);
    s(1) += lambda(1);
    s(2) += lambda(0) + lambda(1);
    const Rational top = s.maxCoeff();
    std::vector<std::size_t> tied;
    for (std::size_t j = 0; j < 3; ++j) {
      if (s(static_cast<Eigen::Index>(j)) == top) tied.push_back(j);
    }
    VectorQ d = VectorQ::Zero(3);
    auto it = rule.weights.find(tied);
    for (std::size_t k = 0; k < tied.size(); ++k) {
      d(static_cast<Eigen::Index>(tied[k])) =
          it == rule.weights.end() ? Rational(1, static_cast<long>(tied.size())) : it->second[k];
    }
    return d;
  });
  CHECK(ref.shares == eval.shares);
  CHECK(ref.utility == eval.utility);
}

TEST_CASE("zero thresholds favouring user 1") {
  auto file = testing::discrete_instance();
  auto eval = exact_tbs_evaluate(file.instance, q({"0", "0"}), LowestIndex{});
  CHECK(eval.shares(0) == Rational(7, 16));
  CHECK_THROWS_AS(exact_tbs_evaluate(file.instance, q({"0", "0"}), ErrorOnTie{}), TieError);
}

TEST_CASE("a dominant threshold forces activation") {
  auto file = testing::discrete_instance();
  const double m = file.instance.bound();
  VectorQ lambda(2);
  lambda << to_rational(2 * m), Rational(0);
  auto eval = exact_tbs_evaluate(file.instance, lambda, LowestIndex{});
  CHECK(eval.shares(0) == 1);
}

TEST_CASE("outcome cap") {
  auto file = testing::discrete_instance();
  CHECK_THROWS_AS(exact_tbs_evaluate(file.instance, q({"0", "0"}), LowestIndex{}, 4), ResourceLimitError);
}

TEST_CASE("LP optimum on the discrete instance") {
  auto file = testing::discrete_instance();
  auto sol = lp_optimal_stationary(file.instance, *file.demands);
  REQUIRE(sol);
  CHECK(sol->utility == Rational(45, 160));
  CHECK(sol->shares(0) >= Rational(1, 2));
  CHECK(sol->shares(1) >= Rational(1, 4));
  REQUIRE(sol->decisions.size() == 8);
  for (const auto& p : sol->decisions) {
    CHECK(p.sum() == 1);
    for (Eigen::Index j = 0; j < p.size(); ++j) CHECK(p(j) >= 0);
  }
}

TEST_CASE("LP with slack demands is the expected maximum") {
  auto file = testing::discrete_instance();
  auto sol = lp_optimal_stationary(file.instance, ExactDemands::lower_only(VectorQ::Zero(2)));
  REQUIRE(sol);
  CHECK(sol->utility == testing::expected_max(file.instance.marginals(), 3));
}

TEST_CASE("LP on a constant single-user instance") {
  VirtualUserFamily f(1, {VirtualUser{1}});
  FiniteSupportInstance inst(f, std::vector<std::vector<Atom>>{{{Rational(3, 7), Rational(1)}}});
  auto sol = lp_optimal_stationary(inst, ExactDemands::lower_only(VectorQ::Zero(1)));
  REQUIRE(sol);
  CHECK(sol->utility == Rational(3, 7));
  CHECK(sol->shares(0) == 1);
}

TEST_CASE("LP reports infeasible demands") {
  VirtualUserFamily f(2, {VirtualUser{1}, VirtualUser{2}});
  std::vector<std::vector<Atom>> m{{{Rational(1), Rational(1)}}, {{Rational(1), Rational(1)}}};
  FiniteSupportInstance inst(f, m);
  CHECK_FALSE(lp_optimal_stationary(inst, ExactDemands::lower_only(q({"3/5", "3/5"}))));
}

TEST_CASE("threshold strategies never beat the LP") {
  auto file = testing::discrete_instance();
  auto best = lp_optimal_stationary(file.instance, *file.demands)->utility;
  for (int a = -4; a <= 6; ++a) {
    for (int b = -4; b <= 6; ++b) {
      VectorQ lambda(2);
      lambda << Rational(a, 20), Rational(b, 20);
      auto eval = exact_tbs_evaluate(file.instance, lambda, StochasticTieBreak{});
      if (eval.shares(0) >= Rational(1, 2) && eval.shares(1) >= Rational(1, 4)) CHECK(eval.utility <= best);
    }
  }
}

TEST_CASE("concavity probe") {
  auto file = testing::discrete_instance();
  ExactDemands d = ExactDemands::lower_only(q({"1/2", "1/4"}));
  ExactDemands d2 = ExactDemands::lower_only(q({"1/4", "1/2"}));
  auto report = concavity_probe(file.instance, d, d2, {Rational(0), Rational(1, 2), Rational(1)});
  CHECK(report.pass);
  CHECK(report.points[0].mixed == report.points[0].combined);
  CHECK(report.points[2].mixed == report.points[2].combined);

  auto same = concavity_probe(file.instance, d, d, {Rational(1, 3), Rational(2, 3)});
  for (const auto& p : same.points) CHECK(p.mixed == p.combined);

  CHECK_THROWS_AS(concavity_probe(file.instance, d, d, {Rational(2)}), InvalidArgument);
}
