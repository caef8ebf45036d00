#include "noma/adapt.hpp"

#include <chrono>

namespace noma {

AdaptState AdaptState::initial(int users, StepMode mode, double step) {
  if (users < 1) throw InvalidArgument("adaptation needs at least one user");
  if (mode == StepMode::Constant && !(step > 0)) throw InvalidArgument("constant step must be positive");
  return AdaptState{ThresholdVector::Zero(users), Eigen::VectorXd::Zero(users), 0, mode, step};
}

double AdaptState::next_step() const {
  return step_mode == StepMode::Harmonic ? 1.0 / static_cast<double>(t + 1) : step;
}

void rm_equality_step(AdaptState& state, const VirtualUser& decision, const Eigen::VectorXd& w) {
  const double s = state.next_step();
  update_temporal_shares(state.shares, state.t, decision);
  for (Eigen::Index i = 0; i < state.lambda.size(); ++i) {
    double indicator = decision.contains(static_cast<int>(i + 1)) ? 1.0 : 0.0;
    state.lambda(i) -= s * (indicator - w(i));
  }
  ++state.t;
}

void algorithm2_step(AdaptState& state, const VirtualUser& decision, const Eigen::VectorXd& lower) {
  const double s = state.next_step();
  update_temporal_shares(state.shares, state.t, decision);
  const ThresholdVector old = state.lambda;
  const double lambda_min = old.minCoeff();
  for (Eigen::Index i = 0; i < old.size(); ++i) {
    double indicator = decision.contains(static_cast<int>(i + 1)) ? 1.0 : 0.0;
    state.lambda(i) = old(i) - s * (old(i) - lambda_min) * (indicator - lower(i));
  }
  // lambda_min comes from the same array, so exact equality identifies the minimizers
  for (Eigen::Index i = 0; i < old.size(); ++i) {
    if (old(i) != lambda_min) continue;
    if (state.shares(i) < lower(i)) state.lambda(i) = old(i) + s * (lower(i) - state.shares(i));
    if (lambda_min < 0) state.lambda(i) = old(i) + s;
  }
  ++state.t;
}

AdaptiveScheduler::AdaptiveScheduler(const VirtualUserFamily& family, TemporalDemands demands, long total_slots,
                                     AdaptOptions options)
    : family_(&family),
      demands_(std::move(demands)),
      options_(std::move(options)),
      state_(AdaptState::initial(family.users(),
                                 options_.mode == AdaptMode::RmEquality ? StepMode::Harmonic : StepMode::Constant,
                                 options_.step)),
      recorder_(family, total_slots, options_.sampling_h) {
  demands_.validate();
  if (demands_.users() != family.users()) throw InvalidArgument("demands do not match the family");
  if (options_.mode == AdaptMode::RmEquality && !demands_.is_equality()) {
    throw InvalidArgument("Robbins-Monro equality mode needs lower == upper demands");
  }
  validate(options_.tie);
}

std::size_t AdaptiveScheduler::step(const PerformanceSample& sample, Rng& rng) {
  std::size_t decision = 0;
  if (options_.perturbation.enabled) {
    decision = tbs_decide(perturb(sample, options_.perturbation, rng).values, state_.lambda, *family_, options_.tie, rng);
  } else {
    decision = tbs_decide(sample.values, state_.lambda, *family_, options_.tie, rng);
  }
  const VirtualUser& chosen = (*family_)[decision];
  if (options_.mode == AdaptMode::RmEquality) {
    if (state_.t < options_.warmup_slots) {
      state_.step_mode = StepMode::Constant;
      state_.step = options_.warmup_step;
    } else {
      state_.step_mode = StepMode::Harmonic;
    }
    rm_equality_step(state_, chosen, demands_.lower);
  } else {
    algorithm2_step(state_, chosen, demands_.lower);
  }
  recorder_.record(decision, sample.values(static_cast<Eigen::Index>(decision)), &state_.lambda);
  return decision;
}

ScheduleTrace AdaptiveScheduler::finish(double wall_seconds) { return recorder_.finish(demands_, wall_seconds); }

AdaptResult run_adaptation(PerformanceSource<double>& source, const TemporalDemands& demands, long slots,
                           const AdaptOptions& options, Rng& rng) {
  if (slots < 1) throw InvalidArgument("a run needs at least one slot");
  const auto start = std::chrono::steady_clock::now();
  AdaptiveScheduler scheduler(source.family(), demands, slots, options);
  for (long t = 0; t < slots; ++t) {
    auto sample = source.draw(rng);
    sample.validate();
    scheduler.step(sample, rng);
  }
  AdaptResult result;
  result.lambda = scheduler.state().lambda;
  result.trace = scheduler.finish(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  if (options.mode == AdaptMode::RmEquality) {
    result.max_residual = (result.trace.shares - demands.lower).cwiseAbs().maxCoeff();
  } else {
    result.max_residual = result.trace.violations.maxCoeff();
  }
  result.converged = result.max_residual <= options.nonconvergence_threshold;
  return result;
}

SlacknessReport check_complementary_slackness(const ThresholdVector& lambda, const Eigen::VectorXd& shares,
                                              const TemporalDemands& demands, double eps) {
  if (lambda.size() != shares.size() || shares.size() != demands.lower.size()) {
    throw InvalidArgument("thresholds, shares and demands must have equal length");
  }
  SlacknessReport report;
  report.pass = true;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    UserSlackness u;
    u.dual_residual = std::max(0.0, -lambda(i));
    u.slackness_residual = std::abs(lambda(i) * (shares(i) - demands.lower(i)));
    u.primal_residual = std::max({0.0, demands.lower(i) - shares(i), shares(i) - demands.upper(i)});
    double worst = std::max({u.dual_residual, u.slackness_residual, u.primal_residual});
    u.pass = worst <= eps;
    report.max_residual = std::max(report.max_residual, worst);
    report.pass = report.pass && u.pass;
    report.users.push_back(u);
  }
  return report;
}

}  // namespace noma
