#include "zonebal/migration.h"

#include <algorithm>

namespace zonebal {
namespace {

void take_locks(Scheduler& sched, const LockCostModel& cost, CpuId src, CpuId dst, int moved,
                SimTime now, Trigger trigger) {
  const int64_t window = cost.window_us(moved);
  sched.lock_cpu(src, window, now);
  sched.lock_cpu(dst, window, now);
  sched.metrics().record_migration_op(MigrationOp{now, src, dst, moved, window, trigger});
}

}  // namespace

int move_tasks(Scheduler& sched, const LockCostModel& cost, CpuId src, CpuId dst, int n,
               SimTime now, Trigger trigger) {
  if (src == dst) throw InvariantViolation("move_tasks: src == dst");
  if (n < 1) throw InvariantViolation("move_tasks: n < 1");
  if (sched.locked(src, now) || sched.locked(dst, now)) return 0;

  std::vector<TaskId> cand = sched.movable_tasks(src, dst);
  if (cand.empty()) return 0;
  std::stable_sort(cand.begin(), cand.end(), [&](TaskId a, TaskId b) {
    const double ua = sched.task(a).usage_pct;
    const double ub = sched.task(b).usage_pct;
    if (ua != ub) return ua > ub;
    return a < b;
  });
  const int moved = std::min<int>(n, static_cast<int>(cand.size()));

  take_locks(sched, cost, src, dst, moved, now, trigger);
  for (int i = 0; i < moved; ++i) sched.relocate_queued(cand[i], dst, now);
  sched.resched_check(dst, now);
  return moved;
}

bool migrate_task(Scheduler& sched, const LockCostModel& cost, TaskId id, CpuId dst,
                  SimTime now, Trigger trigger) {
  const Task& t = sched.task(id);
  const CpuId src = t.cpu;
  if (src == dst || !t.can_run_on(dst)) return false;
  if (t.state == TaskState::kRunning || t.state == TaskState::kExited) return false;
  if (sched.locked(src, now) || sched.locked(dst, now)) return false;

  take_locks(sched, cost, src, dst, 1, now, trigger);
  if (sched.is_blocked(id)) {
    sched.relocate_blocked(id, dst);
  } else {
    sched.relocate_queued(id, dst, now);
    sched.resched_check(dst, now);
  }
  return true;
}

}  // namespace zonebal
