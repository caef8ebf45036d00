#include "noma/scheduler.hpp"

#include <numeric>

namespace noma {

RoundRobinStrategy round_robin_over_family(const VirtualUserFamily& family) {
  RoundRobinStrategy rr;
  rr.cycle.resize(family.size());
  std::iota(rr.cycle.begin(), rr.cycle.end(), std::size_t{0});
  return rr;
}

RoundRobinStrategy round_robin_over_users(const VirtualUserFamily& family) {
  auto singles = family.singleton_indices();
  if (static_cast<int>(singles.size()) != family.users()) {
    throw InvalidArgument("round robin over users needs every singleton in the family");
  }
  return RoundRobinStrategy{std::move(singles)};
}

std::size_t wrr_decide(long t, std::span<const std::size_t> pattern) {
  if (pattern.empty()) throw InvalidArgument("WRR pattern is empty");
  const auto len = static_cast<long>(pattern.size());
  return pattern[static_cast<std::size_t>(((t % len) + len) % len)];
}

PerformanceSample perturb(const PerformanceSample& sample, const PerturbationConfig& cfg, Rng& rng) {
  if (cfg.l < 1) throw InvalidArgument("perturbation scale l must be >= 1");
  if (!cfg.enabled) return sample;
  const double amp = 1.0 / cfg.l;
  std::uniform_real_distribution<double> noise(-amp, amp);
  PerformanceSample out{sample.values, sample.bound + amp};
  for (Eigen::Index j = 0; j < out.values.size(); ++j) out.values(j) += noise(rng);
  return out;
}

}  // namespace noma
