#pragma once

#include "noma/core.hpp"
#include "noma/hilbert.hpp"

#include <iosfwd>

namespace noma {

/// Time fractions a_j >= 0 with sum 1 whose coverage sums reproduce a share vector.
struct FeasibilityCertificate {
  VectorQ a;
};

/// Exact phase-1 test of whether shares w are achievable; returns a certificate if so.
std::optional<FeasibilityCertificate> check_feasibility_equality(const VirtualUserFamily& family, const VectorQ& w);

struct BoxWitness {
  VectorQ w;
  FeasibilityCertificate certificate;
};

/// Searches for an achievable w with lower <= w <= upper.
std::optional<BoxWitness> check_feasibility_box(const VirtualUserFamily& family, const ExactDemands& demands);

/// Checks a >= 0, sum a = 1 and the coverage sums against w, exactly.
bool verify_certificate(const VirtualUserFamily& family, const VectorQ& w, const FeasibilityCertificate& cert);

/// WRR pattern realizing a certificate: period = lcm of the denominators, members laid out
/// in family order.
std::vector<std::size_t> wrr_pattern(const FeasibilityCertificate& cert, std::size_t max_period = 1'000'000);

/// "{1,2} 1/6" per line, zero weights included.
void write_certificate(std::ostream& out, const VirtualUserFamily& family, const FeasibilityCertificate& cert);

/// constant + w_coef . w + a_coef . a >= 0, with `a` the residual (non-eliminated) variables.
struct LinearInequality {
  VectorQ w_coef;
  VectorQ a_coef;
  Rational constant;
  std::string label;
};

struct EliminatedSystem {
  int users = 0;
  std::vector<std::size_t> eliminated;  // family indices solved for
  std::vector<std::size_t> residual;    // family indices kept as variables
  std::vector<LinearInequality> rows;   // involve residual variables
  std::vector<LinearInequality> direct;  // in w only
};

/// Solves the coverage and sum equalities for as many a_j as possible (pivots taken in
/// family order) and substitutes them into a >= 0.
EliminatedSystem eliminate_equalities(const VirtualUserFamily& family);

struct DualSystem {
  IntMatrix matrix;  // one row per residual variable, one column per x_l
  /// Rows of the eliminated system behind each x_l. Substituted rows whose residual
  /// parts coincide after scaling share one variable.
  std::vector<std::vector<std::size_t>> classes;
  /// The eliminated rows, rescaled so that residual parts are primitive integer vectors.
  std::vector<LinearInequality> scaled_rows;
  std::vector<std::string> labels;
};

DualSystem dual_system(const EliminatedSystem& system);

/// c . w >= rhs.
struct RegionInequality {
  VectorQ coef;
  Rational rhs;
  bool operator==(const RegionInequality&) const = default;
};

/// Inequality description of the achievable share vectors.
class RegionDescription {
 public:
  RegionDescription() = default;
  RegionDescription(int users, std::vector<RegionInequality> inequalities);

  int users() const { return users_; }
  const std::vector<RegionInequality>& inequalities() const { return inequalities_; }
  bool contains(const VectorQ& w) const;

  /// One line "c_1 ... c_n >= c_0" per inequality.
  void serialize(std::ostream& out) const;
  static RegionDescription parse(std::istream& in);
  /// Human-readable lines; opposite pairs become "lo <= expr <= hi".
  std::vector<std::string> pretty() const;

 private:
  int users_ = 0;
  std::vector<RegionInequality> inequalities_;
};

/// Human-readable form of one inequality, e.g. "w1 + w2 + w3 <= 2".
std::string pretty(const RegionInequality& ineq);

/// Combines the eliminated rows with each basis element and appends the unit box.
/// Throws InternalError when a residual variable fails to cancel.
RegionDescription region_inequalities(const std::vector<IntVector>& basis, const DualSystem& dual,
                                      const EliminatedSystem& system);

struct RegionPipeline {
  EliminatedSystem system;
  DualSystem dual;
  std::vector<IntVector> basis;
  RegionDescription region;
};

RegionPipeline feasible_region(const VirtualUserFamily& family, const HilbertOptions& options = {});

/// Region inequalities that no point of the demand box satisfies.
std::vector<RegionInequality> violated_by_box(const RegionDescription& region, const ExactDemands& demands);

}  // namespace noma
