#include "zonebal/scheduler.h"

#include <algorithm>
#include <map>
#include <sstream>

namespace zonebal {
namespace {

std::string fmt_task(const char* what, TaskId id, CpuId cpu) {
  std::ostringstream os;
  os << what << ": task " << id << " cpu " << cpu;
  return os.str();
}

}  // namespace

Scheduler::Scheduler(const SchedConfig& cfg, EventSink& sink, MetricsStore& metrics, Rng& rng)
    : cfg_(cfg), sink_(sink), metrics_(metrics), rng_(rng) {
  if (cfg_.n_cpus < 1) throw std::invalid_argument("n_cpus must be >= 1");
  if (cfg_.tick_us <= 0 || cfg_.util_window_us < cfg_.tick_us) {
    throw std::invalid_argument("utilization window must hold at least one tick");
  }
  window_ticks_ = static_cast<size_t>(cfg_.util_window_us / cfg_.tick_us);
  cpus_.resize(cfg_.n_cpus);
  for (int c = 0; c < cfg_.n_cpus; ++c) {
    cpus_[c].cpu = c;
    cpus_[c].busy_window = SlidingWindow(window_ticks_);
  }
}

TaskId Scheduler::create_task(const TaskSpec& spec, SimTime now) {
  spec.behavior.validate();
  if (spec.affinity && (*spec.affinity < 0 || *spec.affinity >= cfg_.n_cpus)) {
    throw std::invalid_argument("task affinity names a missing CPU");
  }
  Task t;
  t.id = static_cast<TaskId>(tasks_.size());
  t.sched_class = spec.sched_class;
  t.priority = spec.priority;
  t.affinity = spec.affinity;
  t.behavior = spec.behavior;
  t.period_us = spec.period_us;
  t.records_latency = spec.records_latency;
  t.exit_after = spec.exit_after;
  t.usage_window = SlidingWindow(window_ticks_);
  if (t.period_us) t.next_periodic_wake = now + *t.period_us;
  tasks_.push_back(std::move(t));
  live_.push_back(tasks_.back().id);
  return tasks_.back().id;
}

void Scheduler::start_task(TaskId id, CpuId cpu, SimTime now) {
  begin_phase(tasks_.at(id));
  enqueue_task(cpu, id, now);
}

void Scheduler::begin_phase(Task& t) {
  const Phase& p = t.behavior.phases[t.phase_index];
  t.remaining_burst_us = p.burst_us.draw(rng_);
  t.next_block_us = p.block_us.draw(rng_);
  t.phase_index = (t.phase_index + 1) % t.behavior.phases.size();
}

void Scheduler::insert_tail(RunQueue& rq, TaskId id) {
  const int r = tasks_[id].rank();
  auto it = std::find_if(rq.queue.begin(), rq.queue.end(),
                         [&](TaskId o) { return tasks_[o].rank() < r; });
  rq.queue.insert(it, id);
}

void Scheduler::insert_head(RunQueue& rq, TaskId id) {
  const int r = tasks_[id].rank();
  auto it = std::find_if(rq.queue.begin(), rq.queue.end(),
                         [&](TaskId o) { return tasks_[o].rank() <= r; });
  rq.queue.insert(it, id);
}

void Scheduler::enqueue_task(CpuId cpu, TaskId id, SimTime now) {
  Task& t = tasks_.at(id);
  RunQueue& rq = cpus_.at(cpu);
  if (t.state == TaskState::kRunning || t.state == TaskState::kRunnable) {
    throw InvariantViolation(fmt_task("double enqueue", id, cpu));
  }
  if (t.state == TaskState::kExited || blocked_.contains(id)) {
    throw InvariantViolation(fmt_task("enqueue of a blocked or exited task", id, cpu));
  }
  if (!t.can_run_on(cpu)) {
    throw InvariantViolation(fmt_task("enqueue violates affinity", id, cpu));
  }
  t.cpu = cpu;
  t.state = TaskState::kRunnable;
  insert_tail(rq, id);
  resched_check(cpu, now);
}

TaskId Scheduler::dequeue_task(CpuId cpu, TaskId id) {
  RunQueue& rq = cpus_.at(cpu);
  if (rq.current == id) throw InvariantViolation(fmt_task("dequeue of running task", id, cpu));
  auto it = std::find(rq.queue.begin(), rq.queue.end(), id);
  if (it == rq.queue.end()) throw InvariantViolation(fmt_task("dequeue of absent task", id, cpu));
  rq.queue.erase(it);
  // In transit: the caller re-enqueues or blocks it.
  tasks_[id].state = TaskState::kBlocked;
  return id;
}

bool Scheduler::locked(CpuId cpu, SimTime now) const {
  return now < cpus_.at(cpu).nonpreemptible_until;
}

void Scheduler::resched_check(CpuId cpu, SimTime now) {
  RunQueue& rq = cpus_.at(cpu);
  if (locked(cpu, now)) return;
  if (!rq.current) {
    try_dispatch(rq, now);
    return;
  }
  if (!rq.queue.empty() && tasks_[rq.queue.front()].rank() > tasks_[*rq.current].rank()) {
    preempt_current(rq, now, /*to_tail=*/false);
  }
}

void Scheduler::account(RunQueue& rq, SimTime now) {
  const int64_t delta = now - rq.last_account;
  if (rq.current && delta > 0) {
    rq.busy_in_tick_us += delta;
    tasks_[*rq.current].exec_in_tick_us += delta;
  }
  rq.last_account = now;
}

void Scheduler::try_dispatch(RunQueue& rq, SimTime now) {
  if (rq.current || rq.queue.empty() || locked(rq.cpu, now)) return;
  const TaskId next = rq.queue.front();
  rq.queue.pop_front();
  run(rq, next, now);
}

void Scheduler::run(RunQueue& rq, TaskId id, SimTime now) {
  account(rq, now);
  Task& t = tasks_[id];
  t.state = TaskState::kRunning;
  t.cpu = rq.cpu;
  t.remaining_burst_us += t.pending_penalty_us;
  t.pending_penalty_us = 0;
  rq.current = id;
  rq.slice_start = now;
  rq.burst_end_at = now + t.remaining_burst_us;
  ++rq.token;
  sink_.post(rq.burst_end_at, event::BurstEnd{rq.cpu, rq.token});
  if (t.wake_time) {
    if (t.records_latency) metrics_.record_latency(*t.wake_time, now, rq.cpu);
    t.wake_time.reset();
  }
}

void Scheduler::preempt_current(RunQueue& rq, SimTime now, bool to_tail) {
  account(rq, now);
  Task& cur = tasks_[*rq.current];
  cur.remaining_burst_us = rq.burst_end_at - now;
  cur.state = TaskState::kRunnable;
  rq.current.reset();
  ++rq.token;
  if (to_tail) {
    insert_tail(rq, cur.id);
  } else {
    insert_head(rq, cur.id);
  }
  try_dispatch(rq, now);
}

void Scheduler::retire(Task& t) {
  t.state = TaskState::kExited;
  live_.erase(std::find(live_.begin(), live_.end(), t.id));
}

void Scheduler::on_burst_end(CpuId cpu, uint64_t token, SimTime now) {
  RunQueue& rq = cpus_.at(cpu);
  if (token != rq.token || !rq.current) return;
  account(rq, now);
  Task& t = tasks_[*rq.current];
  t.remaining_burst_us = 0;
  rq.current.reset();
  ++rq.token;

  if (t.exit_after && now >= *t.exit_after) {
    retire(t);
  } else if (t.period_us) {
    SimTime next = t.next_periodic_wake;
    while (next <= now) next = next + *t.period_us;
    t.state = TaskState::kBlocked;
    blocked_.insert(t.id);
    sink_.post(next, event::TaskWakeup{t.id});
  } else if (t.next_block_us == 0) {
    // Straight into the next burst without leaving the CPU.
    begin_phase(t);
    rq.current = t.id;
    rq.burst_end_at = now + t.remaining_burst_us;
    ++rq.token;
    sink_.post(rq.burst_end_at, event::BurstEnd{rq.cpu, rq.token});
    return;
  } else {
    t.state = TaskState::kBlocked;
    blocked_.insert(t.id);
    sink_.post(now + t.next_block_us, event::TaskWakeup{t.id});
  }
  try_dispatch(rq, now);
}

void Scheduler::wake_task(TaskId id, CpuId cpu, SimTime now) {
  if (!blocked_.contains(id)) throw InvariantViolation(fmt_task("wakeup of a task that is not blocked", id, cpu));
  blocked_.erase(id);
  Task& t = tasks_[id];
  if (t.period_us) t.next_periodic_wake = now + *t.period_us;
  t.wake_time = now;
  begin_phase(t);
  enqueue_task(cpu, id, now);
}

void Scheduler::on_lock_release(CpuId cpu, SimTime now) {
  if (locked(cpu, now)) return;
  resched_check(cpu, now);
}

void Scheduler::lock_cpu(CpuId cpu, int64_t len, SimTime now) {
  if (len < 0) throw InvariantViolation("negative lock window");
  RunQueue& rq = cpus_.at(cpu);
  metrics_.record_lock(cpu, now, len);
  const SimTime until = now + len;
  if (until > rq.nonpreemptible_until) {
    rq.nonpreemptible_until = until;
    sink_.post(until, event::LockRelease{cpu});
  }
}

void Scheduler::relocate_queued(TaskId id, CpuId dst, SimTime now) {
  Task& t = tasks_.at(id);
  dequeue_task(t.cpu, id);
  t.pending_penalty_us += cfg_.cache_penalty_us;
  metrics_.record_task_migrated(cfg_.cache_penalty_us);
  enqueue_task(dst, id, now);
}

void Scheduler::relocate_blocked(TaskId id, CpuId dst) {
  Task& t = tasks_.at(id);
  if (!blocked_.contains(id)) throw InvariantViolation(fmt_task("relocate of a task that is not blocked", id, dst));
  if (!t.can_run_on(dst)) throw InvariantViolation(fmt_task("relocate violates affinity", id, dst));
  t.cpu = dst;
  t.pending_penalty_us += cfg_.cache_penalty_us;
  metrics_.record_task_migrated(cfg_.cache_penalty_us);
}

std::vector<TaskId> Scheduler::movable_tasks(CpuId src, CpuId dst) const {
  std::vector<TaskId> out;
  for (TaskId id : cpus_.at(src).queue) {
    if (tasks_[id].can_run_on(dst)) out.push_back(id);
  }
  return out;
}

int64_t Scheduler::window_denominator_us() const {
  const uint64_t filled = std::min<uint64_t>(ticks_, window_ticks_);
  return static_cast<int64_t>(filled) * cfg_.tick_us;
}

void Scheduler::on_tick(SimTime now) {
  ++ticks_;
  const int64_t denom = window_denominator_us();
  for (RunQueue& rq : cpus_) {
    account(rq, now);
    rq.busy_window.push(rq.busy_in_tick_us);
    rq.busy_in_tick_us = 0;
    rq.cpu_load = static_cast<double>(rq.busy_window.sum()) * 100.0 / static_cast<double>(denom);
    metrics_.record_utilization(rq.cpu_load);
  }
  for (TaskId id : live_) {
    Task& t = tasks_[id];
    t.usage_window.push(t.exec_in_tick_us);
    t.exec_in_tick_us = 0;
    t.usage_pct = static_cast<double>(t.usage_window.sum()) * 100.0 / static_cast<double>(denom);
  }
  for (RunQueue& rq : cpus_) {
    if (!rq.current || locked(rq.cpu, now) || rq.queue.empty()) continue;
    const Task& cur = tasks_[*rq.current];
    if (cur.sched_class != SchedClass::kNormal) continue;
    if (now - rq.slice_start < cfg_.timeslice_us) continue;
    if (tasks_[rq.queue.front()].rank() != cur.rank()) continue;
    preempt_current(rq, now, /*to_tail=*/true);
  }
}

double Scheduler::cpu_utilization(CpuId cpu) const { return cpus_.at(cpu).cpu_load; }

double Scheduler::avg_utilization() const {
  double sum = 0.0;
  for (const RunQueue& rq : cpus_) sum += rq.cpu_load;
  return sum / static_cast<double>(cpus_.size());
}

std::vector<double> Scheduler::utilizations() const {
  std::vector<double> out;
  out.reserve(cpus_.size());
  for (const RunQueue& rq : cpus_) out.push_back(rq.cpu_load);
  return out;
}

std::vector<std::string> Scheduler::check_invariants(SimTime now) const {
  std::vector<std::string> errs;
  std::map<TaskId, int> seen;
  auto note = [&](const std::string& s) { errs.push_back(s); };

  for (const RunQueue& rq : cpus_) {
    int prev_rank = 1 << 20;
    for (TaskId id : rq.queue) {
      ++seen[id];
      const Task& t = tasks_[id];
      if (t.state != TaskState::kRunnable) note(fmt_task("queued task not Runnable", id, rq.cpu));
      if (t.cpu != rq.cpu) note(fmt_task("queued task has stale cpu", id, rq.cpu));
      if (!t.can_run_on(rq.cpu)) note(fmt_task("pinned task on foreign queue", id, rq.cpu));
      if (t.rank() > prev_rank) note(fmt_task("queue out of priority order", id, rq.cpu));
      prev_rank = t.rank();
    }
    if (rq.current) {
      const TaskId id = *rq.current;
      ++seen[id];
      const Task& t = tasks_[id];
      if (t.state != TaskState::kRunning) note(fmt_task("current task not Running", id, rq.cpu));
      if (!t.can_run_on(rq.cpu)) note(fmt_task("pinned task running on foreign cpu", id, rq.cpu));
    }
    if ((rq.idle_state() == IdleState::kSchedIdle) != (rq.nr_running() == 0)) {
      note("idle_state disagrees with nr_running on cpu " + std::to_string(rq.cpu));
    }
    if (rq.cpu_load < 0.0 || rq.cpu_load > 100.0) {
      note("utilization out of range on cpu " + std::to_string(rq.cpu));
    }
    // A window ending exactly now has its LockRelease still pending at this
    // timestamp.
    if (!locked(rq.cpu, now) && rq.nonpreemptible_until != now) {
      if (!rq.current && !rq.queue.empty()) {
        note("cpu " + std::to_string(rq.cpu) + " idle with runnable tasks");
      }
      if (rq.current && !rq.queue.empty() &&
          tasks_[rq.queue.front()].rank() > tasks_[*rq.current].rank()) {
        note("cpu " + std::to_string(rq.cpu) + " runs a lower-priority task");
      }
    }
  }
  for (TaskId id : blocked_) {
    ++seen[id];
    if (tasks_[id].state != TaskState::kBlocked) note(fmt_task("blocked-set task not Blocked", id, tasks_[id].cpu));
    if (!tasks_[id].can_run_on(tasks_[id].cpu)) note(fmt_task("blocked pinned task off its cpu", id, tasks_[id].cpu));
  }
  size_t on_queues = blocked_.size();
  for (const RunQueue& rq : cpus_) on_queues += static_cast<size_t>(rq.nr_running());
  if (on_queues != live_.size()) {
    note("conservation: " + std::to_string(on_queues) + " placed vs " +
         std::to_string(live_.size()) + " live");
  }
  for (TaskId id : live_) {
    auto it = seen.find(id);
    if (it == seen.end()) {
      note(fmt_task("live task in no queue", id, tasks_[id].cpu));
    } else if (it->second != 1) {
      note(fmt_task("task present in several places", id, tasks_[id].cpu));
    }
    const double u = tasks_[id].usage_pct;
    if (u < 0.0 || u > 100.0) note(fmt_task("task usage out of range", id, tasks_[id].cpu));
  }
  return errs;
}

}  // namespace zonebal
