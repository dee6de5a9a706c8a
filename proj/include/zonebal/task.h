#ifndef ZONEBAL_TASK_H_
#define ZONEBAL_TASK_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "zonebal/rng.h"
#include "zonebal/sliding_window.h"
#include "zonebal/types.h"

namespace zonebal {

enum class SchedClass { kRtFifo, kNormal };
enum class TaskState { kRunning, kRunnable, kBlocked, kExited };

// Constant when lo == hi, otherwise uniform over [lo, hi]. Constant draws do
// not consume randomness.
struct Distribution {
  int64_t lo = 0;
  int64_t hi = 0;

  static Distribution constant(int64_t v) { return {v, v}; }
  static Distribution uniform(int64_t lo, int64_t hi) { return {lo, hi}; }

  bool is_constant() const { return lo == hi; }
  int64_t draw(Rng& rng) const { return is_constant() ? lo : rng.uniform(lo, hi); }

  bool operator==(const Distribution&) const = default;
};

struct Phase {
  Distribution burst_us;
  Distribution block_us;
};

// Repeating list of (burst, block) phases.
struct BehaviorScript {
  std::vector<Phase> phases;

  // Throws std::invalid_argument on an empty script, negative bounds, or a
  // phase that can be zero burst and zero block at once.
  void validate() const;
};

// Zone-balancer weight state of one task.
struct WeightState {
  int score = 0;
  // Start of the current above-spot episode.
  std::optional<SimTime> high_usage_since;
  // Start of the current prize window inside that episode.
  SimTime prize_window_start;
};

struct TaskSpec {
  SchedClass sched_class = SchedClass::kNormal;
  int priority = 0;
  std::optional<CpuId> affinity;
  BehaviorScript behavior;
  // Absolute-period sleeper: after each burst it blocks until the next
  // multiple of the period (cyclictest style), ignoring block_us.
  std::optional<int64_t> period_us;
  bool records_latency = false;
  // Exits at the first burst end at or after this time.
  std::optional<SimTime> exit_after;
};

struct Task {
  TaskId id = -1;
  SchedClass sched_class = SchedClass::kNormal;
  int priority = 0;
  std::optional<CpuId> affinity;
  BehaviorScript behavior;
  size_t phase_index = 0;
  TaskState state = TaskState::kBlocked;

  // CPU whose run queue holds the task, or the CPU it last ran on while
  // blocked.
  CpuId cpu = 0;

  int64_t remaining_burst_us = 0;
  int64_t next_block_us = 0;
  int64_t pending_penalty_us = 0;

  // Utilization accounting.
  int64_t exec_in_tick_us = 0;
  SlidingWindow usage_window{1};
  double usage_pct = 0.0;

  WeightState weight;

  std::optional<int64_t> period_us;
  SimTime next_periodic_wake;
  bool records_latency = false;
  std::optional<SimTime> wake_time;
  std::optional<SimTime> exit_after;

  bool pinned() const { return affinity.has_value(); }
  bool can_run_on(CpuId c) const { return !affinity || *affinity == c; }

  // Queue ordering key: every RT priority ranks above NORMAL.
  int rank() const { return sched_class == SchedClass::kRtFifo ? 100 + priority : 0; }
};

}  // namespace zonebal

#endif  // ZONEBAL_TASK_H_
