#include "noma/trace.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

namespace noma {

std::vector<long> snapshot_slots(long total_slots, double h) {
  if (!(h > 0 && h <= 1)) throw InvalidArgument("sampling parameter H must lie in (0, 1]");
  long spacing = std::max(1L, static_cast<long>(std::floor(h * static_cast<double>(total_slots))));
  long count = static_cast<long>(std::floor(1.0 / h + 1e-9));
  std::vector<long> out;
  for (long k = 1; k <= count && k * spacing <= total_slots; ++k) out.push_back(k * spacing);
  return out;
}

Eigen::VectorXd demand_violations(const Eigen::VectorXd& shares, const TemporalDemands& demands) {
  Eigen::VectorXd clamped = shares.cwiseMax(demands.lower).cwiseMin(demands.upper);
  return (shares - clamped).cwiseAbs();
}

TraceRecorder::TraceRecorder(const VirtualUserFamily& family, long total_slots, double sampling_h)
    : family_(&family), sample_at_(snapshot_slots(total_slots, sampling_h)) {
  trace_.shares = Eigen::VectorXd::Zero(family.users());
  trace_.decision_counts.assign(family.size(), 0);
}

void TraceRecorder::record(std::size_t decision, double value, const Eigen::VectorXd* lambda) {
  const long t = trace_.slots;
  update_temporal_shares(trace_.shares, t, (*family_)[decision]);
  trace_.utility += (value - trace_.utility) / static_cast<double>(t + 1);
  ++trace_.decision_counts[decision];
  trace_.slots = t + 1;
  if (next_sample_ < sample_at_.size() && sample_at_[next_sample_] == trace_.slots) {
    trace_.snapshots.push_back(
        TraceSnapshot{trace_.slots, decision, trace_.utility, trace_.shares, lambda ? *lambda : Eigen::VectorXd()});
    ++next_sample_;
  }
}

ScheduleTrace TraceRecorder::finish(const TemporalDemands& demands, double wall_seconds) {
  trace_.violations = demand_violations(trace_.shares, demands);
  trace_.wall_seconds = wall_seconds;
  return trace_;
}

UtilityHistogram::UtilityHistogram(double low, double high, std::size_t bins)
    : low_(low), high_(high), counts_(bins, 0) {
  if (!(high > low) || bins == 0) throw InvalidArgument("histogram needs high > low and at least one bin");
}

void UtilityHistogram::add(double value) {
  double pos = (value - low_) / (high_ - low_) * static_cast<double>(counts_.size());
  auto bin = static_cast<long>(std::floor(pos));
  bin = std::clamp(bin, 0L, static_cast<long>(counts_.size()) - 1);
  ++counts_[static_cast<std::size_t>(bin)];
  ++count_;
}

double UtilityHistogram::cdf(double x) const {
  if (count_ == 0) return 0;
  double width = (high_ - low_) / static_cast<double>(counts_.size());
  long acc = 0;
  for (std::size_t b = 0; b < counts_.size(); ++b) {
    if (low_ + width * static_cast<double>(b + 1) > x + 1e-12) break;
    acc += counts_[b];
  }
  return static_cast<double>(acc) / static_cast<double>(count_);
}

void UtilityHistogram::write_csv(std::ostream& out) const {
  out << "utility,cdf\n";
  double width = (high_ - low_) / static_cast<double>(counts_.size());
  long acc = 0;
  for (std::size_t b = 0; b < counts_.size(); ++b) {
    acc += counts_[b];
    out << std::setprecision(10) << low_ + width * static_cast<double>(b + 1) << ","
        << (count_ ? static_cast<double>(acc) / static_cast<double>(count_) : 0.0) << "\n";
  }
}

void write_trace_csv(std::ostream& out, const ScheduleTrace& trace, const VirtualUserFamily& family) {
  const int n = family.users();
  out << "t,decision,U_t";
  for (int i = 1; i <= n; ++i) out << ",A_" << i;
  for (int i = 1; i <= n; ++i) out << ",lambda_" << i;
  out << "\n" << std::setprecision(12);
  for (const auto& s : trace.snapshots) {
    out << s.t << ",\"" << family[s.decision].to_string() << "\"," << s.utility;
    for (int i = 0; i < n; ++i) out << "," << s.shares(i);
    for (int i = 0; i < n; ++i) {
      out << ",";
      if (s.lambda.size() == n) out << s.lambda(i);
    }
    out << "\n";
  }
}

}  // namespace noma
