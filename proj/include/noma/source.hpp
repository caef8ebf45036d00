#pragma once

#include "noma/core.hpp"

#include <iosfwd>
#include <memory>

namespace noma {

/// Generator of i.i.d. performance vectors for a fixed family.
template <typename Scalar>
class PerformanceSource {
 public:
  virtual ~PerformanceSource() = default;
  virtual const VirtualUserFamily& family() const = 0;
  /// Almost-sure bound M on |R_j|.
  virtual double bound() const = 0;
  virtual BasicPerformanceSample<Scalar> draw(Rng& rng) = 0;
};

/// Independent R_j ~ Unif[low_j, high_j].
class UniformSource final : public PerformanceSource<double> {
 public:
  UniformSource(VirtualUserFamily family, Eigen::VectorXd low, Eigen::VectorXd high);

  const VirtualUserFamily& family() const override { return family_; }
  double bound() const override { return bound_; }
  PerformanceSample draw(Rng& rng) override;

 private:
  VirtualUserFamily family_;
  Eigen::VectorXd low_, high_;
  double bound_;
};

struct Atom {
  Rational value;
  Rational probability;
};

struct JointOutcome {
  VectorQ values;
  Rational probability;
};

/// Performance vector with finite support: either independent per-member marginals or an
/// explicit joint table.
class FiniteSupportInstance {
 public:
  FiniteSupportInstance(VirtualUserFamily family, std::vector<std::vector<Atom>> marginals);
  FiniteSupportInstance(VirtualUserFamily family, std::vector<JointOutcome> joint);

  const VirtualUserFamily& family() const { return family_; }
  bool independent() const { return joint_.empty(); }
  const std::vector<std::vector<Atom>>& marginals() const { return marginals_; }

  std::size_t outcome_count() const;
  /// All joint outcomes with exact probabilities. Throws ResourceLimitError above `cap`.
  std::vector<JointOutcome> outcomes(std::size_t cap = 1'000'000) const;
  /// Exact mean of each member's performance.
  VectorQ mean() const;
  double bound() const;

 private:
  void validate() const;

  VirtualUserFamily family_;
  std::vector<std::vector<Atom>> marginals_;
  std::vector<JointOutcome> joint_;
};

/// Samples a FiniteSupportInstance; values are emitted exactly (Rational) or rounded (double).
template <typename Scalar>
class DiscreteSource final : public PerformanceSource<Scalar> {
 public:
  explicit DiscreteSource(const FiniteSupportInstance& instance);

  const VirtualUserFamily& family() const override { return family_; }
  double bound() const override { return bound_; }
  BasicPerformanceSample<Scalar> draw(Rng& rng) override;

 private:
  struct Table {
    std::vector<double> cumulative;
    std::vector<Vec<Scalar>> values;  // one entry per atom; length 1 for marginals
  };
  std::size_t pick(const Table& t, Rng& rng) const;

  VirtualUserFamily family_;
  bool independent_;
  std::vector<Table> tables_;  // per member (independent) or a single joint table
  double bound_;
};

extern template class DiscreteSource<double>;
extern template class DiscreteSource<Rational>;

/// Instance text file plus its optional demands block.
struct InstanceFile {
  FiniteSupportInstance instance;
  std::optional<ExactDemands> demands;
};

/// Reads the instance text format:
///
///     users 2
///     family {1} {2} {1,2}        (optional, defaults to all subsets up to nmax)
///     nmax 2
///     member {1}
///     0.1 1/2
///     0.2 1/2
///     ...
///     demands
///     lower 1/2 1/4
///     upper 1 1
///
/// A `joint` section ("joint" then lines "p/q v_1 ... v_m") replaces the member blocks.
InstanceFile read_instance(std::istream& in);
InstanceFile read_instance_file(const std::string& path);
void write_instance(std::ostream& out, const InstanceFile& file);

}  // namespace noma
