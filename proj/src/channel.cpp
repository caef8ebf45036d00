#include "noma/channel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <sstream>

namespace noma {

void ChannelParams::validate() const {
  if (!(cell_inner_radius > 0 && cell_inner_radius < cell_outer_radius)) {
    throw InvalidArgument("cell radii must satisfy 0 < inner < outer");
  }
  if (!(bandwidth > 0)) throw InvalidArgument("bandwidth must be positive");
  if (!(max_rate > 0)) throw InvalidArgument("maximum rate must be positive");
  if (!(shadowing_sigma >= 0)) throw InvalidArgument("shadowing sigma must be nonnegative");
}

double pathloss_db(double distance_m, const ChannelParams& params) {
  if (!(distance_m > 0)) throw InvalidArgument("distance must be positive");
  return params.pathloss_intercept + params.pathloss_slope * std::log10(distance_m / 1000.0);
}

double noise_power_dbm(const ChannelParams& params) {
  return params.noise_psd + 10.0 * std::log10(params.bandwidth) + params.noise_figure;
}

double derive_tx_power_budget(const ChannelParams& params) {
  return params.target_snr + noise_power_dbm(params) + pathloss_db(params.cell_outer_radius, params);
}

double tx_power_budget_dbm(const ChannelParams& params) {
  return params.tx_power_max ? *params.tx_power_max : derive_tx_power_budget(params);
}

double sample_channel_gain(double distance_m, const ChannelParams& params, Rng& rng) {
  double loss = pathloss_db(distance_m, params);
  if (params.shadowing_sigma > 0) loss += std::normal_distribution<double>(0.0, params.shadowing_sigma)(rng);
  double gain = std::pow(10.0, -loss / 10.0);
  if (params.fading) gain *= std::exponential_distribution<double>(1.0)(rng);
  return gain;
}

std::vector<std::size_t> sic_order(std::span<const double> gains) {
  std::vector<std::size_t> order(gains.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return gains[a] > gains[b]; });
  return order;
}

std::vector<std::vector<std::size_t>> sic_interference_sets(std::span<const double> gains) {
  auto order = sic_order(gains);
  std::vector<std::vector<std::size_t>> sets(gains.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    std::vector<std::size_t> stronger(order.begin(), order.begin() + static_cast<long>(pos));
    std::sort(stronger.begin(), stronger.end());
    sets[order[pos]] = std::move(stronger);
  }
  return sets;
}

double sinr(std::size_t i, std::span<const double> powers, std::span<const double> gains, double noise_power,
            bool physical) {
  if (!(noise_power > 0)) throw InvalidArgument("noise power must be positive");
  if (powers.size() != gains.size() || i >= gains.size()) throw InvalidArgument("powers and gains misaligned");
  auto order = sic_order(gains);
  double interference = 0;
  for (std::size_t l : order) {
    if (l == i) break;
    interference += powers[l] * (physical ? gains[i] : gains[l]);
  }
  return powers[i] * gains[i] / (interference + noise_power);
}

double rate(double sinr_linear, const RateModel& model) {
  if (!(sinr_linear >= 0)) throw InvalidArgument("SINR must be nonnegative");
  return std::visit(
      [&](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, ShannonRate>) {
          return std::log2(1.0 + sinr_linear);
        } else if constexpr (std::is_same_v<M, TruncatedRate>) {
          return std::min(std::log2(1.0 + sinr_linear), m.max_rate);
        } else {
          if (m.thresholds.empty()) throw InvalidArgument("staircase rate table is empty");
          auto it = std::upper_bound(m.thresholds.begin(), m.thresholds.end(), sinr_linear);
          if (it == m.thresholds.begin()) return 0.0;
          return m.rates[static_cast<std::size_t>(it - m.thresholds.begin()) - 1];
        }
      },
      model);
}

std::optional<double> max_rate(const RateModel& model) {
  if (const auto* t = std::get_if<TruncatedRate>(&model)) return t->max_rate;
  if (const auto* s = std::get_if<StaircaseRate>(&model)) {
    if (s->rates.empty()) throw InvalidArgument("staircase rate table is empty");
    return *std::max_element(s->rates.begin(), s->rates.end());
  }
  return std::nullopt;
}

StaircaseRate read_staircase(std::istream& in) {
  StaircaseRate table;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    for (char& c : line) {
      if (c == ',' || c == '(' || c == ')') c = ' ';
    }
    std::istringstream is(line);
    double threshold_db = 0, r = 0;
    if (!(is >> threshold_db)) continue;
    std::string extra;
    if (!(is >> r) || (is >> extra)) {
      throw InvalidArgument("staircase line " + std::to_string(line_no) + ": expected 'threshold_dB rate'");
    }
    double threshold = std::pow(10.0, threshold_db / 10.0);
    if (!table.thresholds.empty() && !(threshold > table.thresholds.back())) {
      throw InvalidArgument("staircase thresholds must be strictly increasing (line " + std::to_string(line_no) + ")");
    }
    table.thresholds.push_back(threshold);
    table.rates.push_back(r);
  }
  if (table.thresholds.empty()) throw InvalidArgument("staircase rate table is empty");
  return table;
}

StaircaseRate read_staircase_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open staircase table '" + path + "'");
  return read_staircase(in);
}

double required_power(double s, std::span<const double> gains, double noise_power, std::span<const std::size_t> order,
                      std::span<double> powers, bool physical) {
  double received = 0;  // sum of P_l |h_l|^2 over already-placed (stronger) members
  double total = 0;
  double transmitted = 0;  // sum of P_l over stronger members
  for (std::size_t l : order) {
    double interference = physical ? transmitted * gains[l] : received;
    double p = s * (interference + noise_power) / gains[l];
    powers[l] = p;
    received += p * gains[l];
    transmitted += p;
    total += p;
  }
  return total;
}

PowerAllocation maxmin_power_allocation(std::span<const double> gains, double p_max, double noise_power,
                                        const BisectionOptions& options, bool physical) {
  if (gains.empty()) throw InvalidArgument("virtual user has no members");
  if (!(p_max > 0) || !(noise_power > 0)) throw InvalidArgument("power budget and noise must be positive");
  for (double g : gains) {
    if (!(g > 0)) throw InvalidArgument("channel gains must be positive");
  }
  PowerAllocation out;
  out.powers.assign(gains.size(), 0.0);
  if (gains.size() == 1) {
    out.powers[0] = p_max;
    out.common_rate = std::log2(1.0 + p_max * gains[0] / noise_power);
    return out;
  }

  auto order = sic_order(gains);
  // The strongest member alone bounds every feasible common SINR.
  double hi = options.rate_bracket ? *options.rate_bracket : std::log2(1.0 + p_max * gains[order[0]] / noise_power);
  double lo = 0;
  std::vector<double> scratch(gains.size());
  for (int it = 0; it < options.max_iterations && hi - lo > options.tolerance * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    if (required_power(std::exp2(mid) - 1.0, gains, noise_power, order, scratch, physical) <= p_max) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  required_power(std::exp2(lo) - 1.0, gains, noise_power, order, out.powers, physical);
  out.common_rate = lo;
  return out;
}

double virtual_user_rate(std::span<const double> powers, std::span<const double> gains, double noise_power,
                         const RateModel& model, bool physical) {
  double total = 0;
  for (std::size_t i = 0; i < gains.size(); ++i) total += rate(sinr(i, powers, gains, noise_power, physical), model);
  return total;
}

}  // namespace noma
