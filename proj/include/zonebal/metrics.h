#ifndef ZONEBAL_METRICS_H_
#define ZONEBAL_METRICS_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "zonebal/types.h"

namespace zonebal {

struct LatencySample {
  SimTime wake_time;
  SimTime dispatch_time;
  CpuId cpu = 0;

  int64_t latency_us() const { return dispatch_time - wake_time; }
};

struct LockInterval {
  CpuId cpu = 0;
  SimTime start;
  SimTime end;
};

// What caused a balancing decision.
enum class Trigger { kPeriodic, kTaskCreated, kIdleWakeup, kTickBusiestMember, kManual };

const char* trigger_name(Trigger t);

struct MigrationOp {
  SimTime at;
  CpuId src = 0;
  CpuId dst = 0;
  int moved = 0;
  int64_t window_us = 0;
  Trigger trigger = Trigger::kManual;
};

struct CostLedger {
  uint64_t direct_checks = 0;
  uint64_t migrations = 0;
  int64_t cache_penalty_total_us = 0;
  int64_t lock_hold_total_us = 0;
  std::vector<LockInterval> nonpreemptible_intervals;
};

// Append-only collection point for one run.
class MetricsStore {
 public:
  void record_latency(SimTime wake, SimTime dispatch, CpuId cpu);
  void record_check() { ++ledger_.direct_checks; }
  void record_lock(CpuId cpu, SimTime start, int64_t len);
  void record_migration_op(const MigrationOp& op) { ops_.push_back(op); }
  void record_task_migrated(int64_t cache_penalty_us);
  void record_utilization(double cpu_util);

  const std::vector<LatencySample>& samples() const { return samples_; }
  const CostLedger& ledger() const { return ledger_; }
  const std::vector<MigrationOp>& migration_ops() const { return ops_; }

  uint64_t utilization_samples() const { return util_samples_; }
  double max_utilization() const { return max_util_; }
  double min_utilization() const { return min_util_; }
  double mean_utilization() const {
    return util_samples_ ? util_sum_ / static_cast<double>(util_samples_) : 0.0;
  }

 private:
  std::vector<LatencySample> samples_;
  CostLedger ledger_;
  std::vector<MigrationOp> ops_;
  uint64_t util_samples_ = 0;
  double max_util_ = 0.0;
  double min_util_ = 100.0;
  double util_sum_ = 0.0;
};

inline constexpr int64_t kHistogramBinUs = 10;
inline constexpr int64_t kHistogramLimitUs = 1000;
// 100 bins of 10 us covering [0, 1000) plus one overflow bin.
inline constexpr size_t kHistogramBins = kHistogramLimitUs / kHistogramBinUs + 1;

struct LatencySummary {
  uint64_t count = 0;
  // Unset when count == 0.
  std::optional<double> mean_us;
  std::optional<int64_t> min_us;
  std::optional<int64_t> max_us;
  std::optional<int64_t> p99_us;
  std::optional<std::vector<uint64_t>> histogram;
};

LatencySummary summarize(const std::vector<int64_t>& latencies_us);
LatencySummary summarize(const std::vector<LatencySample>& samples);

// Nearest-rank percentile: sorted[min(ceil(pct/100 * n), n - 1)], zero-based.
// For 1..100 that makes p99 = 100.
// Requires a non-empty sample and pct in [1, 100].
int64_t nearest_rank(std::vector<int64_t> values, int pct);

// Everything one run exports.
struct RunReport {
  std::string scenario_hash;
  uint64_t seed = 0;
  std::string policy;
  LatencySummary latency;
  uint64_t migrations = 0;
  uint64_t direct_checks = 0;
  int64_t lock_hold_total_us = 0;
  int64_t cache_penalty_total_us = 0;
  // Not part of the JSON export.
  double mean_utilization = 0.0;
};

RunReport make_report(const MetricsStore& m, std::string scenario_hash,
                      uint64_t seed, std::string policy);

class ScenarioMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// a/b ratios. 0/0 reads as 1.0 and x/0 as unset.
struct Comparison {
  std::string policy_a;
  std::string policy_b;
  std::optional<double> mean_latency_ratio;
  std::optional<double> migration_ratio;
  std::optional<double> lock_hold_ratio;
};

// Throws ScenarioMismatch unless both reports share scenario hash and seed.
Comparison compare(const RunReport& a, const RunReport& b);

std::optional<double> ratio(double a, double b);

// Export formats.
void write_samples_csv(std::ostream& os, const std::vector<LatencySample>& samples);
void write_plot_data(std::ostream& os, const std::vector<LatencySample>& samples);
std::string summary_json(const RunReport& r);
std::string comparison_json(const std::vector<RunReport>& runs,
                            const std::vector<Comparison>& comparisons);

}  // namespace zonebal

#endif  // ZONEBAL_METRICS_H_
