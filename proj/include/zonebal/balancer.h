#ifndef ZONEBAL_BALANCER_H_
#define ZONEBAL_BALANCER_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zonebal/scheduler.h"
#include "zonebal/types.h"

namespace zonebal {

struct BalanceOutcome {
  int migrated = 0;
  bool checked_only = true;
};

// Per-CPU utilization as seen by a balancing decision.
struct LoadSnapshot {
  std::vector<double> cpu_util;

  static LoadSnapshot of(const Scheduler& s) { return {s.utilizations()}; }

  double average() const;
  double max() const;
  // Highest load, lowest id on ties; none when every CPU reads zero.
  std::optional<CpuId> busiest() const;
  // Lowest load, lowest id on ties, skipping `exclude`.
  std::optional<CpuId> least_loaded(std::optional<CpuId> exclude = std::nullopt) const;
};

std::optional<CpuId> find_busiest_queue(std::span<const double> loads);

// Policy hooks the simulator calls. Each balancer sees the scheduler only
// through these points.
class Balancer {
 public:
  virtual ~Balancer() = default;

  // "baseline" or the zone policy label.
  virtual std::string policy_name() const = 0;

  // After the scheduler's tick accounting.
  virtual void on_tick(Scheduler& sched, SimTime now) = 0;

  // Picks the CPU a freshly created task starts on.
  virtual CpuId place_new_task(Scheduler& sched, TaskId id, CpuId creator, SimTime now) = 0;

  // Picks the CPU a blocked task wakes on; may migrate it.
  virtual CpuId select_wakeup_cpu(Scheduler& sched, TaskId id, SimTime now) = 0;
};

}  // namespace zonebal

#endif  // ZONEBAL_BALANCER_H_
