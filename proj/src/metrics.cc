#include "zonebal/metrics.h"

#include <algorithm>
#include <numeric>
#include <ostream>

#include "json.hpp"

namespace zonebal {

using ordered_json = nlohmann::ordered_json;

const char* trigger_name(Trigger t) {
  switch (t) {
    case Trigger::kPeriodic: return "periodic";
    case Trigger::kTaskCreated: return "task_created";
    case Trigger::kIdleWakeup: return "idle_wakeup";
    case Trigger::kTickBusiestMember: return "tick_busiest_member";
    case Trigger::kManual: return "manual";
  }
  return "?";
}

void MetricsStore::record_latency(SimTime wake, SimTime dispatch, CpuId cpu) {
  if (dispatch < wake) {
    throw InvariantViolation("negative scheduling latency");
  }
  samples_.push_back(LatencySample{wake, dispatch, cpu});
}

void MetricsStore::record_lock(CpuId cpu, SimTime start, int64_t len) {
  ledger_.nonpreemptible_intervals.push_back(LockInterval{cpu, start, start + len});
  ledger_.lock_hold_total_us += len;
}

void MetricsStore::record_task_migrated(int64_t cache_penalty_us) {
  ++ledger_.migrations;
  ledger_.cache_penalty_total_us += cache_penalty_us;
}

void MetricsStore::record_utilization(double cpu_util) {
  ++util_samples_;
  util_sum_ += cpu_util;
  max_util_ = std::max(max_util_, cpu_util);
  min_util_ = std::min(min_util_, cpu_util);
}

int64_t nearest_rank(std::vector<int64_t> values, int pct) {
  if (values.empty() || pct < 1 || pct > 100) {
    throw std::invalid_argument("nearest_rank: empty sample or bad percentile");
  }
  const size_t n = values.size();
  // ceil(pct/100 * n) used as a zero-based index into the sorted sample,
  // clamped to the last element.
  const size_t idx = std::min((static_cast<size_t>(pct) * n + 99) / 100, n - 1);
  std::nth_element(values.begin(), values.begin() + idx, values.end());
  return values[idx];
}

LatencySummary summarize(const std::vector<int64_t>& latencies_us) {
  LatencySummary s;
  s.count = latencies_us.size();
  if (latencies_us.empty()) return s;

  const int64_t total = std::accumulate(latencies_us.begin(), latencies_us.end(), int64_t{0});
  s.mean_us = static_cast<double>(total) / static_cast<double>(s.count);
  auto [lo, hi] = std::minmax_element(latencies_us.begin(), latencies_us.end());
  s.min_us = *lo;
  s.max_us = *hi;
  s.p99_us = nearest_rank(latencies_us, 99);

  std::vector<uint64_t> bins(kHistogramBins, 0);
  for (int64_t v : latencies_us) {
    const size_t b = v >= kHistogramLimitUs ? kHistogramBins - 1
                                            : static_cast<size_t>(v / kHistogramBinUs);
    ++bins[b];
  }
  s.histogram = std::move(bins);
  return s;
}

LatencySummary summarize(const std::vector<LatencySample>& samples) {
  std::vector<int64_t> lat;
  lat.reserve(samples.size());
  for (const auto& s : samples) lat.push_back(s.latency_us());
  return summarize(lat);
}

RunReport make_report(const MetricsStore& m, std::string scenario_hash,
                      uint64_t seed, std::string policy) {
  RunReport r;
  r.scenario_hash = std::move(scenario_hash);
  r.seed = seed;
  r.policy = std::move(policy);
  r.latency = summarize(m.samples());
  r.migrations = m.ledger().migrations;
  r.direct_checks = m.ledger().direct_checks;
  r.lock_hold_total_us = m.ledger().lock_hold_total_us;
  r.cache_penalty_total_us = m.ledger().cache_penalty_total_us;
  r.mean_utilization = m.mean_utilization();
  return r;
}

std::optional<double> ratio(double a, double b) {
  if (b == 0.0) {
    if (a == 0.0) return 1.0;
    return std::nullopt;
  }
  return a / b;
}

Comparison compare(const RunReport& a, const RunReport& b) {
  if (a.scenario_hash != b.scenario_hash) {
    throw ScenarioMismatch("cannot compare runs of different scenarios (" +
                           a.scenario_hash + " vs " + b.scenario_hash + ")");
  }
  if (a.seed != b.seed) {
    throw ScenarioMismatch("cannot compare runs with different seeds (" +
                           std::to_string(a.seed) + " vs " + std::to_string(b.seed) + ")");
  }
  Comparison c;
  c.policy_a = a.policy;
  c.policy_b = b.policy;
  if (a.latency.mean_us && b.latency.mean_us) {
    c.mean_latency_ratio = ratio(*a.latency.mean_us, *b.latency.mean_us);
  }
  c.migration_ratio = ratio(static_cast<double>(a.migrations), static_cast<double>(b.migrations));
  c.lock_hold_ratio = ratio(static_cast<double>(a.lock_hold_total_us),
                            static_cast<double>(b.lock_hold_total_us));
  return c;
}

void write_samples_csv(std::ostream& os, const std::vector<LatencySample>& samples) {
  os << "wake_us,dispatch_us,latency_us,cpu\n";
  for (const auto& s : samples) {
    os << s.wake_time.us << ',' << s.dispatch_time.us << ',' << s.latency_us() << ','
       << s.cpu << '\n';
  }
}

void write_plot_data(std::ostream& os, const std::vector<LatencySample>& samples) {
  os << "# time_us latency_us\n";
  for (const auto& s : samples) os << s.wake_time.us << ' ' << s.latency_us() << '\n';
}

namespace {

template <class T>
ordered_json opt(const std::optional<T>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json report_json(const RunReport& r) {
  ordered_json j;
  j["scenario_hash"] = r.scenario_hash;
  j["seed"] = r.seed;
  j["policy"] = r.policy;
  j["samples"] = r.latency.count;
  j["mean_us"] = opt(r.latency.mean_us);
  j["min_us"] = opt(r.latency.min_us);
  j["max_us"] = opt(r.latency.max_us);
  j["p99_us"] = opt(r.latency.p99_us);
  j["histogram"] = opt(r.latency.histogram);
  j["migrations"] = r.migrations;
  j["direct_checks"] = r.direct_checks;
  j["lock_hold_total_us"] = r.lock_hold_total_us;
  j["cache_penalty_total_us"] = r.cache_penalty_total_us;
  return j;
}

}  // namespace

std::string summary_json(const RunReport& r) { return report_json(r).dump(2) + "\n"; }

std::string comparison_json(const std::vector<RunReport>& runs,
                            const std::vector<Comparison>& comparisons) {
  ordered_json j;
  j["scenario_hash"] = runs.empty() ? "" : runs.front().scenario_hash;
  j["seed"] = runs.empty() ? 0 : runs.front().seed;
  j["runs"] = ordered_json::array();
  for (const auto& r : runs) j["runs"].push_back(report_json(r));
  j["comparisons"] = ordered_json::array();
  for (const auto& c : comparisons) {
    ordered_json cj;
    cj["a"] = c.policy_a;
    cj["b"] = c.policy_b;
    cj["mean_latency_ratio"] = opt(c.mean_latency_ratio);
    cj["migration_ratio"] = opt(c.migration_ratio);
    cj["lock_hold_ratio"] = opt(c.lock_hold_ratio);
    j["comparisons"].push_back(cj);
  }
  return j.dump(2) + "\n";
}

}  // namespace zonebal
