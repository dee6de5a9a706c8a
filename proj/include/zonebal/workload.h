#ifndef ZONEBAL_WORKLOAD_H_
#define ZONEBAL_WORKLOAD_H_

#include <cstdint>
#include <vector>

#include "zonebal/rng.h"
#include "zonebal/scheduler.h"
#include "zonebal/task.h"

namespace zonebal {

inline constexpr int kProbePriority = 99;
inline constexpr int64_t kProbeBurstUs = 1;

// cyclictest-style latency probe: an RT FIFO priority 99 thread pinned to one
// CPU that sleeps to the next period boundary and records how long each
// wakeup waits for the CPU.
struct ProbeSpec {
  int64_t period_us = 1000;
  CpuId pinned_cpu = 0;
};

struct StressSpec {
  int n_cpu_hogs = 0;
  int n_io_waiters = 0;
  Distribution hog_burst_us = Distribution::uniform(50'000, 200'000);
  Distribution hog_block_us = Distribution::uniform(1'000, 10'000);
  Distribution waiter_burst_us = Distribution::uniform(100, 2'000);
  Distribution waiter_block_us = Distribution::uniform(2'000, 20'000);
  // Tasks per simulated second arriving on spawn_cpu; 0 disables arrivals.
  double spawn_rate = 0.0;
  CpuId spawn_cpu = 0;
  Distribution spawn_burst_us = Distribution::uniform(1'000, 10'000);
  Distribution spawn_block_us = Distribution::uniform(1'000, 20'000);
  Distribution lifetime_us = Distribution::uniform(100'000, 2'000'000);
};

TaskSpec probe_task_spec(const ProbeSpec& spec);
TaskSpec hog_task_spec(const StressSpec& spec);
TaskSpec waiter_task_spec(const StressSpec& spec);
TaskSpec spawned_task_spec(const StressSpec& spec, SimTime now, Rng& rng);

// Creates and starts the probe on its pinned CPU at `now`.
TaskId spawn_probe(Scheduler& sched, const ProbeSpec& spec, SimTime now);

// Creates the initial hogs then waiters, placed round-robin from CPU 0.
// Arrivals driven by spawn_rate are not created here; see next_arrival().
std::vector<TaskId> spawn_stress(Scheduler& sched, const StressSpec& spec, SimTime now);

// Time of the next arrival after `now`: the mean gap 1e6 / spawn_rate scaled
// by a uniform factor in [0.5, 1.5].
SimTime next_arrival(const StressSpec& spec, SimTime now, Rng& rng);

}  // namespace zonebal

#endif  // ZONEBAL_WORKLOAD_H_
