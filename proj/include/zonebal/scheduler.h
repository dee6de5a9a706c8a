#ifndef ZONEBAL_SCHEDULER_H_
#define ZONEBAL_SCHEDULER_H_

#include <cstdint>
#include <deque>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "zonebal/event_queue.h"
#include "zonebal/metrics.h"
#include "zonebal/rng.h"
#include "zonebal/sliding_window.h"
#include "zonebal/task.h"
#include "zonebal/types.h"

namespace zonebal {

// Where the scheduler posts its future work (burst ends, wakeups, lock
// releases). Implemented by the simulator.
class EventSink {
 public:
  virtual ~EventSink() = default;
  virtual void post(SimTime at, EventKind kind) = 0;
};

struct SchedConfig {
  int n_cpus = 4;
  int64_t tick_us = 1000;
  int64_t util_window_us = 100000;
  int64_t timeslice_us = 4000;
  int64_t cache_penalty_us = 200;
};

enum class IdleState { kSchedIdle, kNotIdle };

struct RunQueue {
  CpuId cpu = 0;
  // Runnable tasks, RT by descending priority then arrival, NORMAL after.
  std::deque<TaskId> queue;
  std::optional<TaskId> current;
  // Double-lock window: no dispatch or preemption before this time.
  SimTime nonpreemptible_until;
  double cpu_load = 0.0;

  int nr_running() const { return static_cast<int>(queue.size()) + (current ? 1 : 0); }
  IdleState idle_state() const {
    return nr_running() == 0 ? IdleState::kSchedIdle : IdleState::kNotIdle;
  }

  // Dispatch bookkeeping.
  uint64_t token = 0;
  SimTime slice_start;
  SimTime burst_end_at;

  // Busy-time accounting.
  SimTime last_account;
  int64_t busy_in_tick_us = 0;
  SlidingWindow busy_window{1};
};

class Scheduler {
 public:
  Scheduler(const SchedConfig& cfg, EventSink& sink, MetricsStore& metrics, Rng& rng);

  const SchedConfig& config() const { return cfg_; }
  int n_cpus() const { return cfg_.n_cpus; }

  // Registers a task. It is in no queue until start_task() places it.
  TaskId create_task(const TaskSpec& spec, SimTime now);
  // Draws the first phase and enqueues on `cpu`.
  void start_task(TaskId id, CpuId cpu, SimTime now);

  void enqueue_task(CpuId cpu, TaskId id, SimTime now);
  TaskId dequeue_task(CpuId cpu, TaskId id);
  void resched_check(CpuId cpu, SimTime now);

  // Moves a blocked task onto `cpu`'s run queue.
  void wake_task(TaskId id, CpuId cpu, SimTime now);

  void on_burst_end(CpuId cpu, uint64_t token, SimTime now);
  void on_lock_release(CpuId cpu, SimTime now);

  // Per-tick accounting: closes the tick's busy time into the utilization
  // windows, refreshes per-task usage and rotates expired NORMAL slices.
  void on_tick(SimTime now);

  // Makes `cpu` non-preemptible for `len` us from `now` and records the hold.
  void lock_cpu(CpuId cpu, int64_t len, SimTime now);
  bool locked(CpuId cpu, SimTime now) const;

  // Migration surgery. Both charge the cache penalty to the moved task.
  void relocate_queued(TaskId id, CpuId dst, SimTime now);
  void relocate_blocked(TaskId id, CpuId dst);

  // Queued (not running) tasks on `src` that may run on `dst`.
  std::vector<TaskId> movable_tasks(CpuId src, CpuId dst) const;

  double cpu_utilization(CpuId cpu) const;
  double avg_utilization() const;
  std::vector<double> utilizations() const;

  const RunQueue& runqueue(CpuId cpu) const { return cpus_.at(cpu); }
  const Task& task(TaskId id) const { return tasks_.at(id); }
  Task& mutable_task(TaskId id) { return tasks_.at(id); }
  const std::vector<TaskId>& live_tasks() const { return live_; }
  size_t blocked_count() const { return blocked_.size(); }
  bool is_blocked(TaskId id) const { return blocked_.contains(id); }
  uint64_t ticks_elapsed() const { return ticks_; }
  MetricsStore& metrics() { return metrics_; }

  // Every structural invariant that must hold between events. Returns one
  // message per violation.
  std::vector<std::string> check_invariants(SimTime now) const;

 private:
  void begin_phase(Task& t);
  void account(RunQueue& rq, SimTime now);
  void try_dispatch(RunQueue& rq, SimTime now);
  void run(RunQueue& rq, TaskId id, SimTime now);
  void preempt_current(RunQueue& rq, SimTime now, bool to_tail);
  void insert_tail(RunQueue& rq, TaskId id);
  void insert_head(RunQueue& rq, TaskId id);
  void retire(Task& t);
  int64_t window_denominator_us() const;

  SchedConfig cfg_;
  EventSink& sink_;
  MetricsStore& metrics_;
  Rng& rng_;
  std::vector<RunQueue> cpus_;
  std::vector<Task> tasks_;
  std::vector<TaskId> live_;
  std::set<TaskId> blocked_;
  size_t window_ticks_ = 1;
  uint64_t ticks_ = 0;
};

}  // namespace zonebal

#endif  // ZONEBAL_SCHEDULER_H_
