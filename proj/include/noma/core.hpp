#pragma once

#include "noma/rational.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace noma {

using Rng = std::mt19937_64;

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Raised by the error-on-tie rule; carries the tied family indices.
class TieError : public std::runtime_error {
 public:
  explicit TieError(std::vector<std::size_t> tied);
  const std::vector<std::size_t>& tied() const { return tied_; }

 private:
  std::vector<std::size_t> tied_;
};

/// A set of users that may be scheduled together. Users are 1-based.
class VirtualUser {
 public:
  VirtualUser() = default;
  explicit VirtualUser(std::vector<int> members);
  VirtualUser(std::initializer_list<int> members) : VirtualUser(std::vector<int>(members)) {}

  const std::vector<int>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool contains(int user) const;

  /// Sorted member list, e.g. "{1,3}".
  std::string to_string() const;
  static VirtualUser parse(std::string_view text);

  auto operator<=>(const VirtualUser&) const = default;

 private:
  std::vector<int> members_;
};

/// The activation structure: which user subsets may be scheduled in one slot.
/// Member order is fixed and indexes every performance vector.
class VirtualUserFamily {
 public:
  VirtualUserFamily(int users, std::vector<VirtualUser> members, std::optional<int> n_max = std::nullopt);

  int users() const { return users_; }
  std::size_t size() const { return members_.size(); }
  std::optional<int> n_max() const { return n_max_; }
  std::size_t max_member_size() const;

  const VirtualUser& operator[](std::size_t j) const { return members_[j]; }
  const std::vector<VirtualUser>& members() const { return members_; }
  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }

  std::optional<std::size_t> index_of(const VirtualUser& v) const;
  /// Family indices of the single-user members, in user order (absent users skipped).
  std::vector<std::size_t> singleton_indices() const;
  /// n x m 0/1 matrix, entry (i, j) = 1 iff user i+1 belongs to member j.
  Eigen::MatrixXi incidence() const;

  /// The subfamily made of the given members, keeping their relative order.
  VirtualUserFamily subfamily(std::span<const std::size_t> indices) const;

  bool operator==(const VirtualUserFamily& other) const {
    return users_ == other.users_ && members_ == other.members_;
  }

 private:
  int users_;
  std::vector<VirtualUser> members_;
  std::optional<int> n_max_;
};

/// All nonempty subsets of {1..n} with at most `n_max` members, ordered by size then
/// lexicographically.
VirtualUserFamily enumerate_virtual_users(int n, int n_max);

/// Lower and upper temporal demand vectors.
template <typename Scalar>
struct BasicTemporalDemands {
  Vec<Scalar> lower;
  Vec<Scalar> upper;

  static BasicTemporalDemands lower_only(Vec<Scalar> lower) {
    Vec<Scalar> upper = Vec<Scalar>::Constant(lower.size(), Scalar(1));
    return {std::move(lower), std::move(upper)};
  }
  static BasicTemporalDemands equality(const Vec<Scalar>& w) { return {w, w}; }

  int users() const { return static_cast<int>(lower.size()); }
  bool is_equality() const { return lower == upper; }

  void validate() const {
    if (lower.size() != upper.size()) throw InvalidArgument("demand vectors differ in length");
    for (Eigen::Index i = 0; i < lower.size(); ++i) {
      if (!(Scalar(0) <= lower(i) && lower(i) <= upper(i) && upper(i) <= Scalar(1))) {
        throw InvalidArgument("demands for user " + std::to_string(i + 1) +
                              " violate 0 <= lower <= upper <= 1");
      }
    }
  }
};

using TemporalDemands = BasicTemporalDemands<double>;
using ExactDemands = BasicTemporalDemands<Rational>;

ExactDemands to_exact(const TemporalDemands& demands);

/// One realization of the performance vector, aligned with family order.
template <typename Scalar>
struct BasicPerformanceSample {
  Vec<Scalar> values;
  double bound = 0;

  void validate() const {
    for (Eigen::Index j = 0; j < values.size(); ++j) {
      double v = as_double(values(j));
      if (!std::isfinite(v)) throw InvalidArgument("non-finite performance value");
      if (std::abs(v) > bound) {
        throw InvalidArgument("performance value " + std::to_string(v) + " exceeds bound " +
                              std::to_string(bound));
      }
    }
  }
};

using PerformanceSample = BasicPerformanceSample<double>;

template <typename Scalar>
using BasicThresholdVector = Vec<Scalar>;
using ThresholdVector = Eigen::VectorXd;

struct ErrorOnTie {};
struct LowestIndex {};
/// Randomized tie breaking. `weights` maps a tied set of family indices (ascending) to a
/// distribution over those members; tied sets without an entry are broken uniformly.
struct StochasticTieBreak {
  std::map<std::vector<std::size_t>, std::vector<Rational>> weights;
};
using TieBreakRule = std::variant<ErrorOnTie, LowestIndex, StochasticTieBreak>;

void validate(const TieBreakRule& rule);

/// Decision distribution the rule assigns to a tied set (one weight per tied member).
std::vector<Rational> tie_distribution(const TieBreakRule& rule, const std::vector<std::size_t>& tied);

/// Resolves a tie to one family index.
std::size_t break_tie(const TieBreakRule& rule, const std::vector<std::size_t>& tied, Rng& rng);

/// S_j = R_j + sum of lambda_i over the members of V_j.
template <typename Scalar>
Vec<Scalar> scheduling_measure(const Vec<Scalar>& values, const Vec<Scalar>& lambda,
                               const VirtualUserFamily& family) {
  if (static_cast<std::size_t>(values.size()) != family.size()) {
    throw InvalidArgument("performance vector has " + std::to_string(values.size()) +
                          " entries, family has " + std::to_string(family.size()));
  }
  if (lambda.size() != family.users()) {
    throw InvalidArgument("threshold vector has " + std::to_string(lambda.size()) + " entries, expected " +
                          std::to_string(family.users()));
  }
  Vec<Scalar> s = values;
  for (std::size_t j = 0; j < family.size(); ++j) {
    for (int u : family[j].members()) s(static_cast<Eigen::Index>(j)) += lambda(u - 1);
  }
  return s;
}

/// Indices attaining the maximum, compared with exact equality.
template <typename Scalar>
std::vector<std::size_t> argmax_set(const Vec<Scalar>& measure) {
  std::vector<std::size_t> best;
  if (measure.size() == 0) return best;
  Eigen::Index top = 0;
  for (Eigen::Index j = 1; j < measure.size(); ++j) {
    if (measure(j) > measure(top)) top = j;
  }
  for (Eigen::Index j = 0; j < measure.size(); ++j) {
    if (measure(j) == measure(top)) best.push_back(static_cast<std::size_t>(j));
  }
  return best;
}

/// Running-mean share update for slot index t (0-based): A += (1{u_i in decision} - A) / (t + 1).
template <typename Scalar>
void update_temporal_shares(Vec<Scalar>& shares, long t, const VirtualUser& decision) {
  const Scalar step = Scalar(1) / Scalar(t + 1);
  for (Eigen::Index i = 0; i < shares.size(); ++i) {
    Scalar indicator = decision.contains(static_cast<int>(i + 1)) ? Scalar(1) : Scalar(0);
    shares(i) += step * (indicator - shares(i));
  }
}

}  // namespace noma
