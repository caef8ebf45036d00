#pragma once

// Independent reference computations used only by tests. None of these call into the
// library's solvers; they enumerate or use closed forms instead.

#include "noma/core.hpp"
#include "noma/hilbert.hpp"
#include "noma/source.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace noma::testing {

/// The two-user discrete instance: independent members with two atoms each.
inline const char* kDiscreteInstance = R"(users 2
nmax 2
member {1}
0.1 1/2
0.2 1/2
member {2}
0.2 1/2
0.3 1/2
member {1,2}
0.1 3/4
0.4 1/4
demands
lower 1/2 1/4
upper 1 1
)";

inline InstanceFile discrete_instance() {
  std::istringstream in(kDiscreteInstance);
  return read_instance(in);
}

/// Tie weights that reach the optimum at lambda = (1/10, 0): the three-way tie goes to
/// {1} / {2} with 1/3 / 2/3 and the {1}/{2} tie goes to {2}.
inline StochasticTieBreak optimal_tie_rule() {
  StochasticTieBreak rule;
  rule.weights[{0, 1, 2}] = {Rational(1, 3), Rational(2, 3), Rational(0)};
  rule.weights[{0, 1}] = {Rational(0), Rational(1)};
  return rule;
}

struct ExactShares {
  VectorQ shares;
  Rational utility;
};

/// Hand-rolled enumeration of independent marginals. `choose` maps an outcome (one value
/// per member) to a decision distribution over members.
inline ExactShares enumerate_independent(const VirtualUserFamily& family, const std::vector<std::vector<Atom>>& marginals,
                                         const std::function<VectorQ(const VectorQ&)>& choose) {
  const std::size_t m = family.size();
  ExactShares out{VectorQ::Zero(family.users()), Rational(0)};
  std::vector<std::size_t> idx(m, 0);
  for (;;) {
    VectorQ values(static_cast<Eigen::Index>(m));
    Rational p = 1;
    for (std::size_t j = 0; j < m; ++j) {
      values(static_cast<Eigen::Index>(j)) = marginals[j][idx[j]].value;
      p *= marginals[j][idx[j]].probability;
    }
    const VectorQ dist = choose(values);
    for (std::size_t j = 0; j < m; ++j) {
      const Rational q = p * dist(static_cast<Eigen::Index>(j));
      if (q == 0) continue;
      out.utility += q * values(static_cast<Eigen::Index>(j));
      for (int u : family[j].members()) out.shares(u - 1) += q;
    }
    std::size_t k = 0;
    while (k < m && ++idx[k] == marginals[k].size()) idx[k++] = 0;
    if (k == m) break;
  }
  return out;
}

/// E[max_j R_j] by enumeration.
inline Rational expected_max(const std::vector<std::vector<Atom>>& marginals, std::size_t m) {
  Rational total = 0;
  std::vector<std::size_t> idx(m, 0);
  for (;;) {
    Rational p = 1;
    Rational best = marginals[0][idx[0]].value;
    for (std::size_t j = 0; j < m; ++j) {
      p *= marginals[j][idx[j]].probability;
      best = std::max(best, marginals[j][idx[j]].value);
    }
    total += p * best;
    std::size_t k = 0;
    while (k < m && ++idx[k] == marginals[k].size()) idx[k++] = 0;
    if (k == m) break;
  }
  return total;
}

/// All nonzero x in [0, bound]^k with A x = 0 that are minimal under componentwise order.
inline std::vector<IntVector> brute_force_minimal_solutions(const IntMatrix& A, std::int64_t bound) {
  const auto k = A.cols();
  std::vector<IntVector> solutions;
  IntVector x = IntVector::Zero(k);
  for (;;) {
    Eigen::Index c = 0;
    while (c < k && ++x(c) > bound) x(c++) = 0;
    if (c == k) break;
    if ((A * x).isZero()) solutions.push_back(x);
  }
  std::vector<IntVector> minimal;
  for (const auto& s : solutions) {
    bool reducible = false;
    for (const auto& t : solutions) {
      if (&t != &s && (t.array() <= s.array()).all() && t != s) {
        reducible = true;
        break;
      }
    }
    if (!reducible) minimal.push_back(s);
  }
  std::sort(minimal.begin(), minimal.end(), [](const IntVector& a, const IntVector& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  });
  return minimal;
}

/// Common SINR of a two-member virtual user at the max-min optimum, from the quadratic
///   (noise / g_weak) s^2 + (noise / g_strong + noise / g_weak) s - p_max = 0.
inline double two_user_equal_sinr(double g1, double g2, double p_max, double noise) {
  const double gs = std::max(g1, g2), gw = std::min(g1, g2);
  const double a = noise / gw, b = noise / gs + noise / gw, c = -p_max;
  return (-b + std::sqrt(b * b - 4 * a * c)) / (2 * a);
}

/// Membership in {0 <= w_i <= 1, 1 <= sum w <= 2}, the three-user pair-family region.
inline bool in_three_user_region(const VectorQ& w) {
  Rational sum = 0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (w(i) < 0 || w(i) > 1) return false;
    sum += w(i);
  }
  return sum >= 1 && sum <= 2;
}

}  // namespace noma::testing
