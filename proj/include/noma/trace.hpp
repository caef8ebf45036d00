#pragma once

#include "noma/core.hpp"

#include <iosfwd>

namespace noma {

struct TraceSnapshot {
  long t = 0;  // slots completed
  std::size_t decision = 0;
  double utility = 0;
  Eigen::VectorXd shares;
  Eigen::VectorXd lambda;  // empty for strategies without thresholds
};

/// Running temporal shares A_{i,t}, running utility U_t and sampled history of one run.
struct ScheduleTrace {
  long slots = 0;
  Eigen::VectorXd shares;
  double utility = 0;
  std::vector<long> decision_counts;
  std::vector<TraceSnapshot> snapshots;
  Eigen::VectorXd violations;  // |A_i - clamp(A_i, lower_i, upper_i)|
  double wall_seconds = 0;
};

/// Slots (1-based counts of completed slots) at which history is recorded: every
/// floor(h * T)-th slot, giving floor(1 / h) snapshots.
std::vector<long> snapshot_slots(long total_slots, double h);

Eigen::VectorXd demand_violations(const Eigen::VectorXd& shares, const TemporalDemands& demands);

/// Incremental accumulator shared by all strategy runners.
class TraceRecorder {
 public:
  TraceRecorder(const VirtualUserFamily& family, long total_slots, double sampling_h);

  /// Records the slot decision and the (unperturbed) performance of the chosen member.
  void record(std::size_t decision, double value, const Eigen::VectorXd* lambda = nullptr);

  long t() const { return trace_.slots; }
  const Eigen::VectorXd& shares() const { return trace_.shares; }
  double utility() const { return trace_.utility; }

  ScheduleTrace finish(const TemporalDemands& demands, double wall_seconds);

 private:
  const VirtualUserFamily* family_;
  ScheduleTrace trace_;
  std::vector<long> sample_at_;
  std::size_t next_sample_ = 0;
};

/// Fixed-bin histogram of per-slot utilities for empirical-CDF export.
class UtilityHistogram {
 public:
  UtilityHistogram(double low, double high, std::size_t bins);
  void add(double value);
  long count() const { return count_; }
  /// Fraction of recorded values <= x, resolved to the bin grid.
  double cdf(double x) const;
  void write_csv(std::ostream& out) const;

 private:
  double low_, high_;
  std::vector<long> counts_;
  long count_ = 0;
};

/// Columns: t, decision, U_t, A_1..A_n, lambda_1..lambda_n.
void write_trace_csv(std::ostream& out, const ScheduleTrace& trace, const VirtualUserFamily& family);

}  // namespace noma
