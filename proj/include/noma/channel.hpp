#pragma once

#include "noma/core.hpp"

#include <Eigen/Core>

#include <iosfwd>
#include <optional>
#include <variant>

namespace noma {

/// Radio environment defaults: 100 m small cell with a 20 m exclusion ring, 10 MHz, -174
/// dBm/Hz noise, 9 dB noise figure, 8 dB log-normal shadowing, 128.1 + 37.6 log10(d/km)
/// pathloss and a 6 bps/Hz rate cap.
struct ChannelParams {
  double cell_outer_radius = 100.0;  // m
  double cell_inner_radius = 20.0;   // m
  double bandwidth = 10e6;           // Hz
  double noise_psd = -174.0;         // dBm/Hz
  double noise_figure = 9.0;         // dB
  double shadowing_sigma = 8.0;      // dB
  double pathloss_intercept = 128.1; // dB at 1 km
  double pathloss_slope = 37.6;      // dB per decade
  double max_rate = 6.0;             // bits/s/Hz
  std::optional<double> tx_power_max;  // dBm; derived from target_snr when unset
  double target_snr = 10.0;          // dB, single user at the cell edge
  bool fading = true;                // unit-mean exponential power per slot
  /// Interference weighted by the receiver's own gain instead of the interferer's.
  bool physical_interference = false;

  void validate() const;
};

double pathloss_db(double distance_m, const ChannelParams& params = {});
double noise_power_dbm(const ChannelParams& params);
inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

/// Transmit budget that gives `target_snr` dB to a lone user at the outer radius (pathloss only).
double derive_tx_power_budget(const ChannelParams& params);
double tx_power_budget_dbm(const ChannelParams& params);

/// Linear power gain |h|^2 = 10^(-(PL + X)/10) * F with X ~ N(0, sigma^2) dB, F ~ Exp(1).
double sample_channel_gain(double distance_m, const ChannelParams& params, Rng& rng);

/// For each member (local index), the local indices of members with strictly larger gain.
/// Equal gains count the lower local index as the stronger one.
std::vector<std::vector<std::size_t>> sic_interference_sets(std::span<const double> gains);

/// Local indices sorted strongest first.
std::vector<std::size_t> sic_order(std::span<const double> gains);

/// SINR of member `i` with interference sum_{l stronger} P_l |h_l|^2 (or P_l |h_i|^2 when
/// `physical` is set).
double sinr(std::size_t i, std::span<const double> powers, std::span<const double> gains, double noise_power,
            bool physical = false);

struct ShannonRate {};
struct TruncatedRate {
  double max_rate = 6.0;
};
/// Piecewise-constant rate: `thresholds` holds linear SINR thresholds, strictly increasing.
struct StaircaseRate {
  std::vector<double> thresholds;
  std::vector<double> rates;
};
using RateModel = std::variant<ShannonRate, TruncatedRate, StaircaseRate>;

double rate(double sinr_linear, const RateModel& model);
/// Largest value `rate` can return, or nullopt when unbounded.
std::optional<double> max_rate(const RateModel& model);

/// Reads "(threshold dB, rate)" pairs, one per line; '#' starts a comment.
StaircaseRate read_staircase(std::istream& in);
StaircaseRate read_staircase_file(const std::string& path);

struct PowerAllocation {
  std::vector<double> powers;  // mW, aligned with the member gains
  double common_rate = 0;      // bits/s/Hz per member, before rate-model mapping
};

struct BisectionOptions {
  double tolerance = 1e-9;  // relative width of the common-rate bracket
  int max_iterations = 200;
  /// Upper end of the initial rate bracket; derived from the strongest member when unset.
  std::optional<double> rate_bracket;
};

/// Total power needed for every member to reach SINR `s`, filling `powers` in member order.
double required_power(double s, std::span<const double> gains, double noise_power, std::span<const std::size_t> order,
                      std::span<double> powers, bool physical = false);

/// Max-min (equal-rate) power split of budget `p_max` over the members of one virtual user,
/// by bisection on the common rate.
PowerAllocation maxmin_power_allocation(std::span<const double> gains, double p_max, double noise_power,
                                        const BisectionOptions& options = {}, bool physical = false);

/// Sum of member rates under `model`.
double virtual_user_rate(std::span<const double> powers, std::span<const double> gains, double noise_power,
                         const RateModel& model, bool physical = false);

}  // namespace noma
