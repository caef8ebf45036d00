#pragma once

#include "noma/core.hpp"
#include "noma/source.hpp"
#include "noma/trace.hpp"

#include <chrono>

namespace noma {

/// Threshold-based strategy: activate argmax_j R_j + sum_{i in V_j} lambda_i.
template <typename Scalar>
struct TbsStrategy {
  BasicThresholdVector<Scalar> lambda;
  TieBreakRule tie = ErrorOnTie{};
};

/// Weighted round robin: slot t activates pattern[t mod |pattern|].
struct WrrStrategy {
  std::vector<std::size_t> pattern;
};

/// Plain round robin over a cycle of family indices.
struct RoundRobinStrategy {
  std::vector<std::size_t> cycle;
};

template <typename Scalar>
using Strategy = std::variant<TbsStrategy<Scalar>, WrrStrategy, RoundRobinStrategy>;

RoundRobinStrategy round_robin_over_family(const VirtualUserFamily& family);
RoundRobinStrategy round_robin_over_users(const VirtualUserFamily& family);

/// Additive Unif[-1/l, 1/l] noise on every performance entry.
struct PerturbationConfig {
  int l = 1;
  bool enabled = false;
};

template <typename Scalar>
std::size_t tbs_decide(const Vec<Scalar>& values, const Vec<Scalar>& lambda, const VirtualUserFamily& family,
                       const TieBreakRule& tie, Rng& rng) {
  return break_tie(tie, argmax_set(scheduling_measure(values, lambda, family)), rng);
}

std::size_t wrr_decide(long t, std::span<const std::size_t> pattern);

/// Perturbed copy of `sample`; the caller keeps the original for utility accounting.
PerformanceSample perturb(const PerformanceSample& sample, const PerturbationConfig& cfg, Rng& rng);

struct RunOptions {
  double sampling_h = 0.1;
  /// Only applies to double-valued sources.
  PerturbationConfig perturbation;
  /// When set, receives every decision (intended for short runs).
  std::vector<std::size_t>* decision_log = nullptr;
};

/// Runs `strategy` for `slots` slots, accumulating shares and the utility of the original
/// (unperturbed) performance of each chosen member.
template <typename Scalar>
ScheduleTrace run_strategy(PerformanceSource<Scalar>& source, const Strategy<Scalar>& strategy,
                           const TemporalDemands& demands, long slots, Rng& rng, const RunOptions& options = {}) {
  if (slots < 1) throw InvalidArgument("a run needs at least one slot");
  const auto& family = source.family();
  if (demands.users() != family.users()) throw InvalidArgument("demands do not match the family");
  if (const auto* wrr = std::get_if<WrrStrategy>(&strategy); wrr && wrr->pattern.empty()) {
    throw InvalidArgument("WRR pattern is empty");
  }
  if (const auto* rr = std::get_if<RoundRobinStrategy>(&strategy); rr && rr->cycle.empty()) {
    throw InvalidArgument("round-robin cycle is empty");
  }
  if (const auto* tbs = std::get_if<TbsStrategy<Scalar>>(&strategy)) validate(tbs->tie);

  const auto start = std::chrono::steady_clock::now();
  TraceRecorder recorder(family, slots, options.sampling_h);
  Eigen::VectorXd lambda_d;
  if (const auto* tbs = std::get_if<TbsStrategy<Scalar>>(&strategy)) {
    lambda_d.resize(tbs->lambda.size());
    for (Eigen::Index i = 0; i < lambda_d.size(); ++i) lambda_d(i) = as_double(tbs->lambda(i));
  }

  for (long t = 0; t < slots; ++t) {
    auto sample = source.draw(rng);
    sample.validate();
    std::size_t decision = 0;
    if (const auto* tbs = std::get_if<TbsStrategy<Scalar>>(&strategy)) {
      if constexpr (std::is_same_v<Scalar, double>) {
        if (options.perturbation.enabled) {
          decision = tbs_decide(perturb(sample, options.perturbation, rng).values, tbs->lambda, family, tbs->tie, rng);
        } else {
          decision = tbs_decide(sample.values, tbs->lambda, family, tbs->tie, rng);
        }
      } else {
        decision = tbs_decide(sample.values, tbs->lambda, family, tbs->tie, rng);
      }
    } else if (const auto* wrr = std::get_if<WrrStrategy>(&strategy)) {
      decision = wrr_decide(t, wrr->pattern);
    } else {
      const auto& cycle = std::get<RoundRobinStrategy>(strategy).cycle;
      decision = wrr_decide(t, cycle);
    }
    if (decision >= family.size()) throw InvalidArgument("strategy chose an index outside the family");
    if (options.decision_log) options.decision_log->push_back(decision);
    recorder.record(decision, as_double(sample.values(static_cast<Eigen::Index>(decision))),
                    lambda_d.size() ? &lambda_d : nullptr);
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return recorder.finish(demands, wall);
}

}  // namespace noma
