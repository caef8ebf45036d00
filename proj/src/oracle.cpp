#include "noma/oracle.hpp"

#include "noma/simplex.hpp"

namespace noma {

TbsEvaluation exact_tbs_evaluate(const FiniteSupportInstance& instance, const VectorQ& lambda,
                                 const TieBreakRule& tie, std::size_t cap) {
  validate(tie);
  const auto& family = instance.family();
  TbsEvaluation out{VectorQ::Zero(family.users()), Rational(0)};
  for (const auto& o : instance.outcomes(cap)) {
    const auto tied = argmax_set(scheduling_measure(o.values, lambda, family));
    const auto dist = tie_distribution(tie, tied);
    for (std::size_t k = 0; k < tied.size(); ++k) {
      if (dist[k] == 0) continue;
      const Rational p = o.probability * dist[k];
      const auto j = tied[k];
      out.utility += p * o.values(static_cast<Eigen::Index>(j));
      for (int u : family[j].members()) out.shares(u - 1) += p;
    }
  }
  return out;
}

std::optional<OracleSolution> lp_optimal_stationary(const FiniteSupportInstance& instance, const ExactDemands& demands,
                                                    std::size_t cap) {
  demands.validate();
  const auto& family = instance.family();
  if (demands.users() != family.users()) throw InvalidArgument("demands do not match the family");
  const auto outcomes = instance.outcomes(cap);
  const auto m = static_cast<Eigen::Index>(family.size());
  const auto r_count = static_cast<Eigen::Index>(outcomes.size());
  const Eigen::MatrixXi inc = family.incidence();

  // Variable r*m + j is p_j(r).
  LinearProgram<Rational> lp(r_count * m);
  VectorQ objective(r_count * m);
  for (Eigen::Index r = 0; r < r_count; ++r) {
    const auto& o = outcomes[static_cast<std::size_t>(r)];
    objective.segment(r * m, m) = o.values * o.probability;
    VectorQ row = VectorQ::Zero(r_count * m);
    row.segment(r * m, m).setOnes();
    lp.add(std::move(row), Sense::Equal, Rational(1));
  }
  lp.set_objective(objective);
  for (Eigen::Index i = 0; i < inc.rows(); ++i) {
    const bool lower_binding = demands.lower(i) > 0;
    const bool upper_binding = demands.upper(i) < 1;
    if (!lower_binding && !upper_binding) continue;
    VectorQ row = VectorQ::Zero(r_count * m);
    for (Eigen::Index r = 0; r < r_count; ++r) {
      for (Eigen::Index j = 0; j < m; ++j) {
        if (inc(i, j)) row(r * m + j) = outcomes[static_cast<std::size_t>(r)].probability;
      }
    }
    if (lower_binding) lp.add(row, Sense::GreaterEqual, demands.lower(i));
    if (upper_binding) lp.add(row, Sense::LessEqual, demands.upper(i));
  }
  auto result = lp.maximize();
  if (result.status != LpStatus::Optimal) return std::nullopt;

  OracleSolution sol;
  sol.utility = result.objective;
  sol.shares = VectorQ::Zero(family.users());
  sol.outcomes = outcomes;
  for (Eigen::Index r = 0; r < r_count; ++r) {
    VectorQ p = result.x.segment(r * m, m);
    sol.shares += inc.cast<Rational>() * p * outcomes[static_cast<std::size_t>(r)].probability;
    sol.decisions.push_back(std::move(p));
  }
  return sol;
}

ConcavityReport concavity_probe(const FiniteSupportInstance& instance, const ExactDemands& d, const ExactDemands& d2,
                                const std::vector<Rational>& alphas) {
  auto u1 = lp_optimal_stationary(instance, d);
  auto u2 = lp_optimal_stationary(instance, d2);
  if (!u1 || !u2) throw InvalidArgument("concavity probe needs feasible endpoint demands");
  ConcavityReport report;
  report.pass = true;
  for (const auto& alpha : alphas) {
    if (alpha < 0 || alpha > 1) throw InvalidArgument("alpha must lie in [0, 1]");
    const Rational beta = Rational(1) - alpha;
    ExactDemands mix{VectorQ(d.lower * alpha + d2.lower * beta), VectorQ(d.upper * alpha + d2.upper * beta)};
    auto u = lp_optimal_stationary(instance, mix);
    if (!u) throw InternalError("a convex combination of feasible demands was reported infeasible");
    ConcavityPoint pt{alpha, u->utility, alpha * u1->utility + beta * u2->utility, false};
    pt.holds = pt.mixed >= pt.combined;
    report.pass = report.pass && pt.holds;
    report.points.push_back(std::move(pt));
  }
  return report;
}

}  // namespace noma
