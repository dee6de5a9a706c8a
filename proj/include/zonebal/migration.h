#ifndef ZONEBAL_MIGRATION_H_
#define ZONEBAL_MIGRATION_H_

#include <cstdint>

#include "zonebal/metrics.h"
#include "zonebal/scheduler.h"

namespace zonebal {

// Cost of the double-locked migration: both run queues stay
// non-preemptible for lock_base_us + per_task_us * moved.
struct LockCostModel {
  int64_t lock_base_us = 30;
  int64_t per_task_us = 20;

  int64_t window_us(int moved) const { return lock_base_us + per_task_us * moved; }
};

// Moves up to `n` queued tasks from `src` to `dst`, highest usage first
// (lowest id on ties). Running and pinned tasks never move. Returns 0
// without side effects when nothing is movable or either run queue is
// already locked.
int move_tasks(Scheduler& sched, const LockCostModel& cost, CpuId src, CpuId dst, int n,
               SimTime now, Trigger trigger);

// Moves one specific task, queued on `src` or blocked with `src` as its last
// CPU, under the same cost model. Returns false when a lock is already held
// or the task cannot move.
bool migrate_task(Scheduler& sched, const LockCostModel& cost, TaskId id, CpuId dst,
                  SimTime now, Trigger trigger);

}  // namespace zonebal

#endif  // ZONEBAL_MIGRATION_H_
