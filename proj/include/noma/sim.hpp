#pragma once

#include "noma/adapt.hpp"
#include "noma/channel.hpp"

#include <cstdint>
#include <string>

namespace noma {

struct Position {
  double x = 0;
  double y = 0;
  double radius() const { return std::hypot(x, y); }
};

/// Positions uniform over the annulus area.
std::vector<Position> place_users(int n, double inner, double outer, Rng& rng);

/// Moves `distance` metres along `theta`, mirroring off both annulus boundaries.
Position move_in_annulus(Position p, double theta, double distance, double inner, double outer);

/// One random-walk step: theta ~ Unif[0, 2 pi), speed ~ Unif[speed_min, speed_max].
Position mobility_step(Position p, double speed_min, double speed_max, double slot_duration, double inner,
                       double outer, Rng& rng);

enum class Mobility { Static, RandomWalk };
enum class Shadowing { PerSlot, PerPlacement };

/// "shannon", "truncated" (cap from the channel parameters) or "staircase:<path>".
RateModel parse_rate_model(const std::string& spec, const ChannelParams& params);

struct ScenarioConfig {
  int users = 5;
  int n_max = 2;
  /// Explicit virtual users; empty means every subset of at most n_max users.
  std::vector<VirtualUser> family_members;
  ChannelParams channel;
  std::string rate_model = "truncated";
  /// Empty vectors mean no lower demand and no upper demand.
  Eigen::VectorXd demand_lower;
  Eigen::VectorXd demand_upper;
  long slots = 5'000'000;
  Mobility mobility = Mobility::Static;
  double speed_min = 1.0;      // m/s
  double speed_max = 10.0;     // m/s
  double slot_duration = 1e-3;  // s
  Shadowing shadowing = Shadowing::PerSlot;
  AdaptMode adaptation = AdaptMode::Algorithm2;
  double step_size = 0.001;
  double sampling_h = 0.1;
  int perturb_l = 0;  // 0 disables perturbation
  bool benchmarks = true;  // OMA (n_max = 1) and round-robin arms on the same draws
  int replications = 1;
  int jobs = 1;
  std::uint64_t seed = 1;
  std::size_t cdf_bins = 1200;

  VirtualUserFamily family() const;
  TemporalDemands demands() const;
  void validate() const;
};

/// Per-slot performance of every family member: fresh gains, max-min power split and
/// member rates under the rate model.
class ChannelSource final : public PerformanceSource<double> {
 public:
  ChannelSource(VirtualUserFamily family, std::vector<Position> positions, ChannelParams params, RateModel model,
                Shadowing shadowing, Rng& placement_rng);

  const VirtualUserFamily& family() const override { return family_; }
  double bound() const override { return bound_; }
  PerformanceSample draw(Rng& rng) override;

  const std::vector<Position>& positions() const { return positions_; }
  void set_positions(std::vector<Position> positions);
  /// Gains of the last draw.
  const std::vector<double>& gains() const { return gains_; }
  double p_max() const { return p_max_; }
  double noise() const { return noise_; }

 private:
  VirtualUserFamily family_;
  std::vector<Position> positions_;
  ChannelParams params_;
  RateModel model_;
  Shadowing shadowing_;
  std::vector<double> shadowing_db_;
  std::vector<double> gains_;
  double p_max_, noise_, bound_;
};

/// Performance of every member for fixed gains.
PerformanceSample performance_for_gains(std::span<const double> gains, const VirtualUserFamily& family, double p_max,
                                        double noise, const RateModel& model, bool physical, double bound);

/// One slot of the channel pipeline for the given positions.
PerformanceSample draw_performance(const std::vector<Position>& positions, const VirtualUserFamily& family,
                                   const ChannelParams& params, const RateModel& model, Rng& rng);

/// Raised before a run when the demands lie outside the feasible region.
class InfeasibleDemands : public std::runtime_error {
 public:
  InfeasibleDemands(const std::string& what, std::vector<std::string> violated)
      : std::runtime_error(what), violated_(std::move(violated)) {}
  const std::vector<std::string>& violated() const { return violated_; }

 private:
  std::vector<std::string> violated_;
};

/// Throws InfeasibleDemands naming region inequalities the demand box cannot meet.
void require_feasible(const VirtualUserFamily& family, const TemporalDemands& demands);

struct ArmResult {
  std::string name;
  ScheduleTrace trace;
  ThresholdVector lambda;
  UtilityHistogram cdf;
};

struct ScenarioResult {
  int replication = 0;
  std::vector<Position> positions;
  std::vector<ArmResult> arms;
};

/// Runs one replication: arm "noma" (adaptive TBS on the configured family) plus, with
/// benchmarks, "oma" (adaptive TBS on the singletons, when the family has every singleton
/// and a member with two or more users) and "rr" (round robin over the family), all on the
/// same channel draws.
ScenarioResult run_scenario(const ScenarioConfig& config, int replication = 0);

/// All replications, `config.jobs` at a time. Results are independent of `jobs`.
std::vector<ScenarioResult> run_replications(const ScenarioConfig& config);

/// Writes summary.csv plus per-arm trace and CDF files into `dir`.
void write_scenario_outputs(const std::string& dir, const ScenarioConfig& config,
                            const std::vector<ScenarioResult>& results);

/// Seed for one (replication, stream) pair of a run.
Rng stream_rng(std::uint64_t seed, int replication, int stream);

}  // namespace noma
