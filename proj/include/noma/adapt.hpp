#pragma once

#include "noma/scheduler.hpp"

namespace noma {

enum class StepMode { Harmonic, Constant };

/// Threshold-adaptation state. `t` counts completed slots; the step taken in the next slot
/// is 1/(t+1) in harmonic mode and `step` in constant mode.
struct AdaptState {
  ThresholdVector lambda;
  Eigen::VectorXd shares;
  long t = 0;
  StepMode step_mode = StepMode::Harmonic;
  double step = 0.001;

  static AdaptState initial(int users, StepMode mode, double step = 0.001);
  double next_step() const;
};

/// Robbins-Monro step for equality demands w: lambda_i -= s_t (1{u_i in decision} - w_i).
void rm_equality_step(AdaptState& state, const VirtualUser& decision, const Eigen::VectorXd& w);

/// One iteration of the heuristic threshold update for lower demands (constant step).
void algorithm2_step(AdaptState& state, const VirtualUser& decision, const Eigen::VectorXd& lower);

enum class AdaptMode { RmEquality, Algorithm2 };

struct AdaptOptions {
  AdaptMode mode = AdaptMode::Algorithm2;
  double step = 0.001;  // constant step of the heuristic update
  double sampling_h = 0.1;
  PerturbationConfig perturbation;
  TieBreakRule tie = ErrorOnTie{};
  double nonconvergence_threshold = 0.05;
  /// Harmonic mode only: use `warmup_step` instead of 1/t for the first slots.
  long warmup_slots = 0;
  double warmup_step = 0.01;
};

/// TBS whose thresholds adapt after every slot. Usable slot by slot so that several
/// schedulers can share one performance draw.
class AdaptiveScheduler {
 public:
  AdaptiveScheduler(const VirtualUserFamily& family, TemporalDemands demands, long total_slots, AdaptOptions options);

  /// Decides on `sample` (perturbed internally when configured), updates thresholds and
  /// shares, and accounts the original value of the chosen member.
  std::size_t step(const PerformanceSample& sample, Rng& rng);

  const AdaptState& state() const { return state_; }
  const TraceRecorder& recorder() const { return recorder_; }
  ScheduleTrace finish(double wall_seconds);

 private:
  const VirtualUserFamily* family_;
  TemporalDemands demands_;
  AdaptOptions options_;
  AdaptState state_;
  TraceRecorder recorder_;
};

struct AdaptResult {
  ThresholdVector lambda;
  ScheduleTrace trace;
  /// max_i |A_i - w_i| (equality mode) or the largest demand violation (heuristic mode).
  double max_residual = 0;
  bool converged = false;
};

AdaptResult run_adaptation(PerformanceSource<double>& source, const TemporalDemands& demands, long slots,
                           const AdaptOptions& options, Rng& rng);

struct UserSlackness {
  double dual_residual = 0;     // max(0, -lambda_i)
  double slackness_residual = 0;  // |lambda_i (A_i - lower_i)|
  double primal_residual = 0;   // distance of A_i from [lower_i, upper_i]
  bool pass = false;
};

struct SlacknessReport {
  std::vector<UserSlackness> users;
  double max_residual = 0;
  bool pass = false;
};

/// Checks lambda >= 0, lambda_i (A_i - lower_i) = 0 and lower <= A <= upper, each within eps.
SlacknessReport check_complementary_slackness(const ThresholdVector& lambda, const Eigen::VectorXd& shares,
                                              const TemporalDemands& demands, double eps);

}  // namespace noma
