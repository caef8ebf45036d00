#include "noma/sim.hpp"

#include "noma/feasibility.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <thread>

namespace noma {

std::vector<Position> place_users(int n, double inner, double outer, Rng& rng) {
  if (n < 1) throw InvalidArgument("need at least one user");
  if (!(inner > 0 && inner < outer)) throw InvalidArgument("annulus radii must satisfy 0 < inner < outer");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Position> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    // Inverse CDF of the radius: F(r) = (r^2 - inner^2) / (outer^2 - inner^2).
    const double r = std::sqrt(inner * inner + unit(rng) * (outer * outer - inner * inner));
    const double theta = 2.0 * std::numbers::pi * unit(rng);
    out.push_back({r * std::cos(theta), r * std::sin(theta)});
  }
  return out;
}

Position move_in_annulus(Position p, double theta, double distance, double inner, double outer) {
  Position q{p.x + distance * std::cos(theta), p.y + distance * std::sin(theta)};
  for (int bounce = 0; bounce < 64; ++bounce) {
    const double r = q.radius();
    double target = r;
    if (r > outer) {
      target = 2.0 * outer - r;
    } else if (r < inner) {
      target = 2.0 * inner - r;
    } else {
      return q;
    }
    if (r == 0) return {inner, 0.0};
    q.x *= target / r;
    q.y *= target / r;
  }
  // Only reachable for steps much longer than the ring width.
  const double r = q.radius();
  const double clamped = std::clamp(r, inner, outer);
  return r > 0 ? Position{q.x * clamped / r, q.y * clamped / r} : Position{inner, 0.0};
}

Position mobility_step(Position p, double speed_min, double speed_max, double slot_duration, double inner,
                       double outer, Rng& rng) {
  const double theta = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
  const double speed = std::uniform_real_distribution<double>(speed_min, speed_max)(rng);
  return move_in_annulus(p, theta, speed * slot_duration, inner, outer);
}

RateModel parse_rate_model(const std::string& spec, const ChannelParams& params) {
  if (spec == "shannon") return ShannonRate{};
  if (spec == "truncated") return TruncatedRate{params.max_rate};
  if (spec.rfind("staircase:", 0) == 0) return read_staircase_file(spec.substr(10));
  throw InvalidArgument("unknown rate model '" + spec + "' (shannon | truncated | staircase:<path>)");
}

VirtualUserFamily ScenarioConfig::family() const {
  if (family_members.empty()) return enumerate_virtual_users(users, n_max);
  return VirtualUserFamily(users, family_members);
}

TemporalDemands ScenarioConfig::demands() const {
  TemporalDemands d;
  d.lower = demand_lower.size() ? demand_lower : Eigen::VectorXd::Zero(users);
  d.upper = demand_upper.size() ? demand_upper : Eigen::VectorXd::Ones(users);
  return d;
}

void ScenarioConfig::validate() const {
  if (users < 1) throw InvalidArgument("users must be >= 1");
  if (n_max < 1 || n_max > users) throw InvalidArgument("nmax must lie in [1, users]");
  (void)family();
  channel.validate();
  if (slots < 1) throw InvalidArgument("slots must be >= 1");
  if (!(speed_min > 0 && speed_min <= speed_max)) throw InvalidArgument("speed range must satisfy 0 < min <= max");
  if (!(slot_duration > 0)) throw InvalidArgument("slot duration must be positive");
  if (!(step_size > 0)) throw InvalidArgument("step size must be positive");
  if (!(sampling_h > 0 && sampling_h <= 1)) throw InvalidArgument("sampling H must lie in (0, 1]");
  if (perturb_l < 0) throw InvalidArgument("perturbation l must be >= 0");
  if (replications < 1) throw InvalidArgument("replications must be >= 1");
  if (jobs < 1) throw InvalidArgument("jobs must be >= 1");
  if (cdf_bins < 1) throw InvalidArgument("cdf bins must be >= 1");
  if (demand_lower.size() && demand_lower.size() != users) throw InvalidArgument("demands.lower needs one entry per user");
  if (demand_upper.size() && demand_upper.size() != users) throw InvalidArgument("demands.upper needs one entry per user");
  demands().validate();
  if (adaptation == AdaptMode::RmEquality && !demands().is_equality()) {
    throw InvalidArgument("rm-equality adaptation needs lower == upper demands");
  }
}

namespace {

double performance_bound(const RateModel& model, std::size_t max_members) {
  auto cap = max_rate(model);
  return cap ? *cap * static_cast<double>(max_members) : std::numeric_limits<double>::infinity();
}

}  // namespace

ChannelSource::ChannelSource(VirtualUserFamily family, std::vector<Position> positions, ChannelParams params,
                             RateModel model, Shadowing shadowing, Rng& placement_rng)
    : family_(std::move(family)),
      params_(std::move(params)),
      model_(std::move(model)),
      shadowing_(shadowing) {
  params_.validate();
  p_max_ = dbm_to_mw(tx_power_budget_dbm(params_));
  noise_ = dbm_to_mw(noise_power_dbm(params_));
  bound_ = performance_bound(model_, family_.max_member_size());
  set_positions(std::move(positions));
  if (shadowing_ == Shadowing::PerPlacement && params_.shadowing_sigma > 0) {
    std::normal_distribution<double> shadow(0.0, params_.shadowing_sigma);
    for (auto& x : shadowing_db_) x = shadow(placement_rng);
  }
}

void ChannelSource::set_positions(std::vector<Position> positions) {
  if (static_cast<int>(positions.size()) != family_.users()) throw InvalidArgument("one position per user required");
  positions_ = std::move(positions);
  shadowing_db_.resize(positions_.size(), 0.0);
  gains_.resize(positions_.size(), 0.0);
}

PerformanceSample ChannelSource::draw(Rng& rng) {
  std::normal_distribution<double> shadow(0.0, params_.shadowing_sigma);
  std::exponential_distribution<double> fading(1.0);
  for (std::size_t i = 0; i < positions_.size(); ++i) {
    double loss = pathloss_db(positions_[i].radius(), params_);
    if (params_.shadowing_sigma > 0) loss += shadowing_ == Shadowing::PerSlot ? shadow(rng) : shadowing_db_[i];
    double g = std::pow(10.0, -loss / 10.0);
    if (params_.fading) g *= fading(rng);
    gains_[i] = g;
  }
  return performance_for_gains(gains_, family_, p_max_, noise_, model_, params_.physical_interference, bound_);
}

PerformanceSample performance_for_gains(std::span<const double> gains, const VirtualUserFamily& family, double p_max,
                                        double noise, const RateModel& model, bool physical, double bound) {
  PerformanceSample out{Eigen::VectorXd(static_cast<Eigen::Index>(family.size())), bound};
  std::vector<double> member_gains;
  for (std::size_t j = 0; j < family.size(); ++j) {
    const auto& members = family[j].members();
    if (members.size() == 1) {
      out.values(static_cast<Eigen::Index>(j)) = rate(p_max * gains[members[0] - 1] / noise, model);
      continue;
    }
    member_gains.clear();
    for (int u : members) member_gains.push_back(gains[u - 1]);
    auto alloc = maxmin_power_allocation(member_gains, p_max, noise, {}, physical);
    out.values(static_cast<Eigen::Index>(j)) = virtual_user_rate(alloc.powers, member_gains, noise, model, physical);
  }
  return out;
}

PerformanceSample draw_performance(const std::vector<Position>& positions, const VirtualUserFamily& family,
                                   const ChannelParams& params, const RateModel& model, Rng& rng) {
  std::vector<double> gains;
  for (const auto& p : positions) gains.push_back(sample_channel_gain(p.radius(), params, rng));
  return performance_for_gains(gains, family, dbm_to_mw(tx_power_budget_dbm(params)),
                               dbm_to_mw(noise_power_dbm(params)), model, params.physical_interference,
                               performance_bound(model, family.max_member_size()));
}

void require_feasible(const VirtualUserFamily& family, const TemporalDemands& demands) {
  const auto exact = to_exact(demands);
  if (check_feasibility_box(family, exact)) return;
  std::vector<std::string> violated;
  try {
    const auto region = feasible_region(family).region;
    for (const auto& q : violated_by_box(region, exact)) violated.push_back(pretty(q));
  } catch (const ResourceLimitError&) {
    // Region too expensive to describe; report without diagnostics.
  }
  std::string what = "demands are infeasible";
  if (!violated.empty()) {
    what += "; violated:";
    for (const auto& v : violated) what += " " + v + ";";
    what.pop_back();
  }
  throw InfeasibleDemands(what, std::move(violated));
}

Rng stream_rng(std::uint64_t seed, int replication, int stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(replication), static_cast<std::uint32_t>(stream)};
  return Rng(seq);
}

ScenarioResult run_scenario(const ScenarioConfig& config, int replication) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto family = config.family();
  const auto demands = config.demands();
  require_feasible(family, demands);

  Rng placement = stream_rng(config.seed, replication, 0);
  Rng channel = stream_rng(config.seed, replication, 1);
  Rng mobility = stream_rng(config.seed, replication, 2);
  Rng noma_rng = stream_rng(config.seed, replication, 3);
  Rng oma_rng = stream_rng(config.seed, replication, 4);

  const auto& cp = config.channel;
  ChannelSource source(family, place_users(config.users, cp.cell_inner_radius, cp.cell_outer_radius, placement), cp,
                       parse_rate_model(config.rate_model, cp), config.shadowing, placement);
  ScenarioResult result;
  result.replication = replication;
  result.positions = source.positions();

  AdaptOptions opts;
  opts.mode = config.adaptation;
  opts.step = config.step_size;
  opts.sampling_h = config.sampling_h;
  opts.perturbation = {std::max(config.perturb_l, 1), config.perturb_l > 0};
  // Truncation makes rates atomic at the cap, so exact ties occur; break them uniformly.
  opts.tie = StochasticTieBreak{};

  const long T = config.slots;
  const double hist_high = std::isfinite(source.bound()) ? source.bound() : 30.0 * config.n_max;
  AdaptiveScheduler noma(family, demands, T, opts);
  UtilityHistogram noma_cdf(0.0, hist_high, config.cdf_bins);

  const auto singles = family.singleton_indices();
  const bool with_oma = config.benchmarks && family.max_member_size() > 1 &&
                        static_cast<int>(singles.size()) == config.users;
  std::optional<VirtualUserFamily> oma_family;
  std::optional<AdaptiveScheduler> oma;
  if (with_oma) {
    oma_family.emplace(family.subfamily(singles));
    oma.emplace(*oma_family, demands, T, opts);
  }
  UtilityHistogram oma_cdf(0.0, hist_high, config.cdf_bins);

  std::optional<TraceRecorder> rr;
  if (config.benchmarks) rr.emplace(family, T, config.sampling_h);
  UtilityHistogram rr_cdf(0.0, hist_high, config.cdf_bins);

  PerformanceSample single{Eigen::VectorXd(static_cast<Eigen::Index>(singles.size())), source.bound()};
  std::vector<Position> positions = source.positions();
  for (long t = 0; t < T; ++t) {
    if (config.mobility == Mobility::RandomWalk) {
      for (auto& p : positions) {
        p = mobility_step(p, config.speed_min, config.speed_max, config.slot_duration, cp.cell_inner_radius,
                          cp.cell_outer_radius, mobility);
      }
      source.set_positions(positions);
    }
    const auto sample = source.draw(channel);
    sample.validate();
    const auto d = noma.step(sample, noma_rng);
    noma_cdf.add(sample.values(static_cast<Eigen::Index>(d)));
    if (oma) {
      for (std::size_t k = 0; k < singles.size(); ++k) {
        single.values(static_cast<Eigen::Index>(k)) = sample.values(static_cast<Eigen::Index>(singles[k]));
      }
      const auto d1 = oma->step(single, oma_rng);
      oma_cdf.add(single.values(static_cast<Eigen::Index>(d1)));
    }
    if (rr) {
      const auto j = static_cast<std::size_t>(t % static_cast<long>(family.size()));
      rr->record(j, sample.values(static_cast<Eigen::Index>(j)));
      rr_cdf.add(sample.values(static_cast<Eigen::Index>(j)));
    }
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  result.arms.push_back({"noma", noma.finish(wall), noma.state().lambda, std::move(noma_cdf)});
  if (oma) result.arms.push_back({"oma", oma->finish(wall), oma->state().lambda, std::move(oma_cdf)});
  if (rr) result.arms.push_back({"rr", rr->finish(demands, wall), ThresholdVector(), std::move(rr_cdf)});
  return result;
}

std::vector<ScenarioResult> run_replications(const ScenarioConfig& config) {
  config.validate();
  std::vector<ScenarioResult> results(static_cast<std::size_t>(config.replications));
  std::vector<std::exception_ptr> errors(results.size());
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int r; (r = next++) < config.replications;) {
      try {
        results[static_cast<std::size_t>(r)] = run_scenario(config, r);
      } catch (...) {
        errors[static_cast<std::size_t>(r)] = std::current_exception();
      }
    }
  };
  const int threads = std::min(config.jobs, config.replications);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

void write_scenario_outputs(const std::string& dir, const ScenarioConfig& config,
                            const std::vector<ScenarioResult>& results) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto open = [&](const std::string& name) {
    std::ofstream out(fs::path(dir) / name);
    if (!out) throw std::ios_base::failure("cannot write '" + (fs::path(dir) / name).string() + "'");
    out.precision(10);
    return out;
  };
  const auto family = config.family();
  const auto singles = family.singleton_indices();

  auto summary = open("summary.csv");
  summary << "replication,arm,slots,utility";
  for (int i = 1; i <= config.users; ++i) summary << ",A_" << i;
  for (int i = 1; i <= config.users; ++i) summary << ",lambda_" << i;
  summary << ",max_violation,wall_seconds\n";
  for (const auto& res : results) {
    for (const auto& arm : res.arms) {
      summary << res.replication << ',' << arm.name << ',' << arm.trace.slots << ',' << arm.trace.utility;
      for (Eigen::Index i = 0; i < arm.trace.shares.size(); ++i) summary << ',' << arm.trace.shares(i);
      for (int i = 0; i < config.users; ++i) {
        summary << ',';
        if (arm.lambda.size()) summary << arm.lambda(i);
      }
      summary << ',' << arm.trace.violations.maxCoeff() << ',' << arm.trace.wall_seconds << '\n';

      const std::string tag = arm.name + "_r" + std::to_string(res.replication);
      auto trace = open("trace_" + tag + ".csv");
      if (arm.name == "oma") {
        write_trace_csv(trace, arm.trace, family.subfamily(singles));
      } else {
        write_trace_csv(trace, arm.trace, family);
      }
      auto cdf = open("cdf_" + tag + ".csv");
      arm.cdf.write_csv(cdf);
    }
  }
}

}  // namespace noma
