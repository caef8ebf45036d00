#pragma once

#include "noma/source.hpp"

namespace noma {

struct TbsEvaluation {
  VectorQ shares;
  Rational utility;
};

/// Expected shares and utility of a TBS, by enumerating every joint outcome.
TbsEvaluation exact_tbs_evaluate(const FiniteSupportInstance& instance, const VectorQ& lambda,
                                 const TieBreakRule& tie, std::size_t cap = 1'000'000);

/// Optimal randomized stationary strategy under the demands.
struct OracleSolution {
  Rational utility;
  VectorQ shares;
  std::vector<JointOutcome> outcomes;
  /// decisions[r](j): probability of activating member j on outcome r.
  std::vector<VectorQ> decisions;
};

/// Solves max sum_r P(r) sum_j p_j(r) R_j(r) over per-outcome decision distributions,
/// subject to the demands, with the exact simplex. Empty when the demands are infeasible.
std::optional<OracleSolution> lp_optimal_stationary(const FiniteSupportInstance& instance, const ExactDemands& demands,
                                                    std::size_t cap = 1'000'000);

struct ConcavityPoint {
  Rational alpha;
  Rational mixed;     // U*(alpha d + (1 - alpha) d')
  Rational combined;  // alpha U*(d) + (1 - alpha) U*(d')
  bool holds = false;
};

struct ConcavityReport {
  std::vector<ConcavityPoint> points;
  bool pass = false;
};

/// Checks U*(alpha d + (1 - alpha) d') >= alpha U*(d) + (1 - alpha) U*(d') exactly.
/// Throws InvalidArgument when either endpoint is infeasible.
ConcavityReport concavity_probe(const FiniteSupportInstance& instance, const ExactDemands& d, const ExactDemands& d2,
                                const std::vector<Rational>& alphas);

}  // namespace noma
