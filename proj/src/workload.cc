#include "zonebal/workload.h"

#include <cmath>

namespace zonebal {

TaskSpec probe_task_spec(const ProbeSpec& spec) {
  TaskSpec t;
  t.sched_class = SchedClass::kRtFifo;
  t.priority = kProbePriority;
  t.affinity = spec.pinned_cpu;
  t.behavior.phases = {Phase{Distribution::constant(kProbeBurstUs), Distribution::constant(0)}};
  t.period_us = spec.period_us;
  t.records_latency = true;
  return t;
}

TaskSpec hog_task_spec(const StressSpec& spec) {
  TaskSpec t;
  t.behavior.phases = {Phase{spec.hog_burst_us, spec.hog_block_us}};
  return t;
}

TaskSpec waiter_task_spec(const StressSpec& spec) {
  TaskSpec t;
  t.behavior.phases = {Phase{spec.waiter_burst_us, spec.waiter_block_us}};
  return t;
}

TaskSpec spawned_task_spec(const StressSpec& spec, SimTime now, Rng& rng) {
  TaskSpec t;
  t.behavior.phases = {Phase{spec.spawn_burst_us, spec.spawn_block_us}};
  t.exit_after = now + spec.lifetime_us.draw(rng);
  return t;
}

TaskId spawn_probe(Scheduler& sched, const ProbeSpec& spec, SimTime now) {
  if (spec.pinned_cpu < 0 || spec.pinned_cpu >= sched.n_cpus()) {
    throw std::invalid_argument("probe pinned_cpu does not exist");
  }
  if (spec.period_us <= 0) throw std::invalid_argument("probe period must be positive");
  const TaskId id = sched.create_task(probe_task_spec(spec), now);
  sched.start_task(id, spec.pinned_cpu, now);
  return id;
}

std::vector<TaskId> spawn_stress(Scheduler& sched, const StressSpec& spec, SimTime now) {
  std::vector<TaskId> ids;
  int slot = 0;
  auto place = [&](const TaskSpec& ts) {
    const TaskId id = sched.create_task(ts, now);
    sched.start_task(id, slot++ % sched.n_cpus(), now);
    ids.push_back(id);
  };
  for (int i = 0; i < spec.n_cpu_hogs; ++i) place(hog_task_spec(spec));
  for (int i = 0; i < spec.n_io_waiters; ++i) place(waiter_task_spec(spec));
  return ids;
}

SimTime next_arrival(const StressSpec& spec, SimTime now, Rng& rng) {
  const auto mean_gap = static_cast<int64_t>(std::llround(1e6 / spec.spawn_rate));
  const int64_t gap = rng.uniform(std::max<int64_t>(1, mean_gap / 2), std::max<int64_t>(1, mean_gap + mean_gap / 2));
  return now + gap;
}

}  // namespace zonebal
