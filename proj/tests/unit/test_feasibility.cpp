#include "noma/feasibility.hpp"
#include "noma/scheduler.hpp"

#include "support/oracles.hpp"

#include <doctest.h>

#include <set>
#include <sstream>

using namespace noma;

namespace {

VectorQ q(std::initializer_list<const char*> xs) {
  VectorQ v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (const char* x : xs) v(i++) = parse_rational(x);
  return v;
}

const LinearInequality& row_labelled(const EliminatedSystem& s, const std::string& label) {
  for (const auto& r : s.rows) {
    if (r.label == label) return r;
  }
  throw std::runtime_error("no row " + label);
}

/// Grid of step 1/20 over [0,1]^n.
template <typename F>
void for_each_grid_point(int n, F&& f) {
  std::vector<int> k(static_cast<std::size_t>(n), 0);
  for (;;) {
    VectorQ w(n);
    for (int i = 0; i < n; ++i) w(i) = Rational(k[static_cast<std::size_t>(i)], 20);
    f(w);
    int c = 0;
    while (c < n && ++k[static_cast<std::size_t>(c)] > 20) k[static_cast<std::size_t>(c++)] = 0;
    if (c == n) break;
  }
}

}  // namespace

TEST_CASE("equality feasibility") {
  auto f = enumerate_virtual_users(3, 2);
  auto cert = check_feasibility_equality(f, q({"1/2", "1/2", "1/2"}));
  REQUIRE(cert);
  CHECK(verify_certificate(f, q({"1/2", "1/2", "1/2"}), *cert));
  // the all-1/6 schedule is one valid certificate
  CHECK(verify_certificate(f, q({"1/2", "1/2", "1/2"}), FeasibilityCertificate{VectorQ::Constant(6, Rational(1, 6))}));

  CHECK_FALSE(check_feasibility_equality(f, q({"9/10", "9/10", "9/10"})));

  auto single = check_feasibility_equality(f, q({"1", "0", "0"}));
  REQUIRE(single);
  CHECK(single->a == q({"1", "0", "0", "0", "0", "0"}));

  CHECK_THROWS_AS(check_feasibility_equality(f, q({"1", "0"})), InvalidArgument);
}

TEST_CASE("certificate verification catches bad certificates") {
  auto f = enumerate_virtual_users(2, 2);
  const VectorQ w = q({"7/10", "7/10"});
  CHECK(verify_certificate(f, w, {q({"3/10", "3/10", "2/5"})}));
  CHECK_FALSE(verify_certificate(f, w, {q({"3/10", "3/10", "1/2"})}));
  CHECK_FALSE(verify_certificate(f, w, {q({"-1/10", "7/10", "2/5"})}));
  CHECK_FALSE(verify_certificate(f, w, {q({"1/2", "1/2"})}));
}

TEST_CASE("box feasibility") {
  auto f2 = enumerate_virtual_users(2, 2);
  ExactDemands d{q({"0.6", "0.6"}), q({"1", "1"})};
  auto witness = check_feasibility_box(f2, d);
  REQUIRE(witness);
  CHECK(verify_certificate(f2, witness->w, witness->certificate));
  for (int i = 0; i < 2; ++i) CHECK(witness->w(i) >= Rational(3, 5));
  // the (3/10, 3/10, 2/5) weights are a valid witness for this box too
  CHECK(verify_certificate(f2, q({"0.7", "0.7"}), {q({"0.3", "0.3", "0.4"})}));

  auto f3 = enumerate_virtual_users(3, 2);
  CHECK_FALSE(check_feasibility_box(f3, ExactDemands{q({"0.8", "0.8", "0.8"}), q({"1", "1", "1"})}));

  // a collapsed box behaves like the equality test
  for (auto w : {q({"1/2", "1/2", "1/2"}), q({"9/10", "9/10", "9/10"}), q({"1/5", "0", "1/5"})}) {
    CHECK(check_feasibility_box(f3, ExactDemands::equality(w)).has_value() ==
          check_feasibility_equality(f3, w).has_value());
  }
}

TEST_CASE("WRR pattern from a certificate") {
  auto f = enumerate_virtual_users(2, 2);
  auto pattern = wrr_pattern({q({"3/10", "3/10", "2/5"})});
  CHECK(pattern == std::vector<std::size_t>{0, 0, 0, 1, 1, 1, 2, 2, 2, 2});
  CHECK_THROWS_AS(wrr_pattern({q({"1/3", "1/3", "1/3"})}, 2), ResourceLimitError);

  std::ostringstream out;
  write_certificate(out, f, {q({"3/10", "3/10", "2/5"})});
  CHECK(out.str() == "{1} 3/10\n{2} 3/10\n{1,2} 2/5\n");
}

TEST_CASE("WRR over a certificate reproduces the shares over one period") {
  auto f = enumerate_virtual_users(3, 2);
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    // random achievable w via random rational a
    VectorQ a(6);
    Rational total = 0;
    for (int j = 0; j < 6; ++j) total += (a(j) = Rational(static_cast<long>(rng() % 5)));
    if (total == 0) continue;
    a /= total;
    const VectorQ w = f.incidence().cast<Rational>() * a;
    auto cert = check_feasibility_equality(f, w);
    REQUIRE(cert);
    CHECK(verify_certificate(f, w, *cert));
    auto pattern = wrr_pattern(*cert);
    VectorQ shares = VectorQ::Zero(3);
    for (std::size_t t = 0; t < pattern.size(); ++t) update_temporal_shares(shares, static_cast<long>(t), f[pattern[t]]);
    CHECK(shares == w);
  }
}

TEST_CASE("elimination on the three-user pair family") {
  auto f = enumerate_virtual_users(3, 2);
  auto sys = eliminate_equalities(f);
  CHECK(sys.eliminated == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(sys.residual == std::vector<std::size_t>{4, 5});
  CHECK(sys.direct.empty());
  REQUIRE(sys.rows.size() == 6);

  // 0 <= 1 + a13 - w1 - w3
  const auto& a2 = row_labelled(sys, "a{2}");
  CHECK(a2.constant == 1);
  CHECK(a2.w_coef == q({"-1", "0", "-1"}));
  CHECK(a2.a_coef == q({"1", "0"}));
  // 0 <= 1 + a23 - w2 - w3
  const auto& a1 = row_labelled(sys, "a{1}");
  CHECK(a1.constant == 1);
  CHECK(a1.w_coef == q({"0", "-1", "-1"}));
  CHECK(a1.a_coef == q({"0", "1"}));
  // a13 + a23 <= w3 and a13 + a23 <= w1 + w2 + w3 - 1
  const auto& a3 = row_labelled(sys, "a{3}");
  CHECK(a3.constant == 0);
  CHECK(a3.w_coef == q({"0", "0", "1"}));
  CHECK(a3.a_coef == q({"-1", "-1"}));
  const auto& a12 = row_labelled(sys, "a{1,2}");
  CHECK(a12.constant == -1);
  CHECK(a12.w_coef == q({"1", "1", "1"}));
  CHECK(a12.a_coef == q({"-1", "-1"}));
}

TEST_CASE("dual system on the three-user pair family") {
  auto f = enumerate_virtual_users(3, 2);
  auto dual = dual_system(eliminate_equalities(f));
  CHECK(dual.labels == std::vector<std::string>{"a{1}", "a{2}", "a{3}|a{1,2}", "a{1,3}", "a{2,3}"});
  IntMatrix expected(2, 5);
  // columns follow the labels above
  expected << 0, 1, -1, 1, 0,
              1, 0, -1, 0, 1;
  CHECK(dual.matrix == expected);
}

TEST_CASE("dual system edge cases") {
  // no residual variables
  auto f2 = enumerate_virtual_users(2, 2);
  auto sys = eliminate_equalities(f2);
  CHECK(sys.residual.empty());
  auto dual = dual_system(sys);
  CHECK(dual.matrix.size() == 0);

  // one residual variable entering with +1 and -1: x_p = x_q
  EliminatedSystem hand;
  hand.users = 1;
  hand.residual = {0};
  hand.rows.push_back({q({"1"}), q({"1"}), Rational(0), "p"});
  hand.rows.push_back({q({"-1"}), q({"-2"}), Rational(1), "q"});
  auto d = dual_system(hand);
  IntMatrix expected(1, 2);
  expected << 1, -1;
  CHECK(d.matrix == expected);
  CHECK(d.scaled_rows[1].constant == Rational(1, 2));
}

TEST_CASE("region on the three-user pair family") {
  auto f = enumerate_virtual_users(3, 2);
  auto p = feasible_region(f);
  REQUIRE(p.basis.size() == 4);
  std::vector<std::string> pretty = p.region.pretty();
  CHECK(pretty == std::vector<std::string>{"0 <= w1 <= 1", "0 <= w2 <= 1", "0 <= w3 <= 1", "1 <= w1 + w2 + w3 <= 2"});
  CHECK(p.region.inequalities().size() == 8);

  auto violated = violated_by_box(p.region, ExactDemands::lower_only(q({"0.9", "0.9", "0.9"})));
  REQUIRE(violated.size() == 1);
  CHECK(noma::pretty(violated[0]) == "w1 + w2 + w3 <= 2");
}

TEST_CASE("region agrees with the LP on grids") {
  for (auto [n, nmax] : std::vector<std::pair<int, int>>{{2, 2}, {2, 1}, {3, 2}, {3, 1}, {3, 3}}) {
    CAPTURE(n);
    CAPTURE(nmax);
    auto f = enumerate_virtual_users(n, nmax);
    auto region = feasible_region(f).region;
    int disagreements = 0;
    for_each_grid_point(n, [&](const VectorQ& w) {
      if (region.contains(w) != check_feasibility_equality(f, w).has_value()) ++disagreements;
    });
    CHECK(disagreements == 0);
  }
}

TEST_CASE("region on a heterogeneous family") {
  VirtualUserFamily f(3, {VirtualUser{1}, VirtualUser{2}, VirtualUser{3}, VirtualUser{1, 2}, VirtualUser{1, 2, 3}});
  auto region = feasible_region(f).region;
  int disagreements = 0;
  for_each_grid_point(3, [&](const VectorQ& w) {
    if (region.contains(w) != check_feasibility_equality(f, w).has_value()) ++disagreements;
  });
  CHECK(disagreements == 0);
}

TEST_CASE("singleton family forces the shares to sum to one") {
  auto f = enumerate_virtual_users(2, 1);
  auto region = feasible_region(f).region;
  CHECK(region.contains(q({"1/4", "3/4"})));
  CHECK_FALSE(region.contains(q({"1/4", "1/4"})));
  CHECK_FALSE(region.contains(q({"1/2", "3/4"})));
}

TEST_CASE("region inequalities detect a bad basis") {
  auto f = enumerate_virtual_users(3, 2);
  auto sys = eliminate_equalities(f);
  auto dual = dual_system(sys);
  IntVector bogus = IntVector::Zero(5);
  bogus(0) = 1;
  CHECK_THROWS_AS(region_inequalities({bogus}, dual, sys), InternalError);
}

TEST_CASE("region serialization round trip") {
  auto region = feasible_region(enumerate_virtual_users(3, 2)).region;
  std::ostringstream out;
  region.serialize(out);
  CHECK(out.str().find("-1 -1 -1 >= -2\n") != std::string::npos);
  std::istringstream in(out.str());
  auto back = RegionDescription::parse(in);
  CHECK(back.users() == 3);
  CHECK(back.inequalities() == region.inequalities());

  std::istringstream bad("1 2 3\n");
  CHECK_THROWS_AS(RegionDescription::parse(bad), InvalidArgument);
  std::istringstream ragged("1 0 >= 0\n1 >= 0\n");
  CHECK_THROWS_AS(RegionDescription::parse(ragged), InvalidArgument);
}

TEST_CASE("pretty printing") {
  CHECK(pretty(RegionInequality{q({"-1", "-1", "-1"}), Rational(-2)}) == "w1 + w2 + w3 <= 2");
  CHECK(pretty(RegionInequality{q({"2", "0", "-1"}), Rational(1, 2)}) == "2 w1 - w3 >= 1/2");
}
