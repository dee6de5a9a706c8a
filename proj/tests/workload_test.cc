#include <gtest/gtest.h>

#include "test_util.h"
#include "zonebal/migration.h"
#include "zonebal/simulator.h"
#include "zonebal/workload.h"

namespace zonebal {
namespace {

using testing::empty_scenario;
using testing::quiet_scenario;

TEST(Probe, SpecIsPinnedRt99) {
  const TaskSpec t = probe_task_spec(ProbeSpec{500, 2});
  EXPECT_EQ(t.sched_class, SchedClass::kRtFifo);
  EXPECT_EQ(t.priority, 99);
  EXPECT_EQ(t.affinity, 2);
  EXPECT_EQ(t.period_us, 500);
  EXPECT_TRUE(t.records_latency);
}

TEST(Probe, IdleSystemHasZeroLatency) {
  Scenario s = quiet_scenario(2, 100'000);
  s.probe = ProbeSpec{1000, 1};
  Simulator sim(s);
  sim.run();
  const auto& samples = sim.metrics().samples();
  ASSERT_EQ(samples.size(), 100u);
  for (const auto& x : samples) {
    EXPECT_EQ(x.latency_us(), 0);
    EXPECT_EQ(x.cpu, 1);
  }
}

TEST(Probe, SampleCountFollowsPeriod) {
  for (int64_t period : {250, 1000, 3000}) {
    Scenario s = quiet_scenario(1, 60'000);
    s.probe = ProbeSpec{period, 0};
    Simulator sim(s);
    sim.run();
    EXPECT_EQ(sim.metrics().samples().size(), static_cast<size_t>(60'000 / period)) << period;
  }
}

TEST(Probe, LockWindowAtWakeDelaysDispatch) {
  Scenario s = quiet_scenario(2, 10'000);
  s.probe = ProbeSpec{1000, 0};
  Simulator sim(s);
  const TaskId other = sim.scheduler().create_task(testing::normal_task(1'000'000, 1), sim.now());
  sim.scheduler().start_task(other, 1, sim.now());
  const TaskId queued = sim.scheduler().create_task(testing::normal_task(1'000'000, 1), sim.now());
  sim.scheduler().start_task(queued, 1, sim.now());
  sim.step_until(SimTime(999));
  // A one-task migration from CPU 1 to CPU 0 just before the probe's wake.
  ASSERT_EQ(move_tasks(sim.scheduler(), LockCostModel{}, 1, 0, 1, SimTime(1000), Trigger::kManual), 1);
  sim.step_until(SimTime(1999));
  ASSERT_GE(sim.metrics().samples().size(), 1u);
  EXPECT_EQ(sim.metrics().samples()[0].wake_time, SimTime(1000));
  EXPECT_EQ(sim.metrics().samples()[0].latency_us(), 50);
}

TEST(Probe, NeverMigrates) {
  Scenario s = empty_scenario(4, 3'000'000);
  s.probe = ProbeSpec{};
  s.stress.n_cpu_hogs = 4;
  s.stress.n_io_waiters = 8;
  s.stress.spawn_rate = 20;
  for (BalancerKind kind : {BalancerKind::kBaseline, BalancerKind::kZone}) {
    s.balancer = kind;
    s.zone.policy = ZonePolicy::hot();
    Simulator sim(s);
    sim.set_observer([](const Event&, Simulator& sm) {
      const Task& probe = sm.scheduler().task(0);
      ASSERT_EQ(probe.cpu, 0);
    });
    sim.run();
    EXPECT_GT(sim.metrics().samples().size(), 2900u);
  }
}

TEST(Stress, ZeroCountsCreateNothing) {
  Simulator sim(quiet_scenario(4));
  EXPECT_TRUE(spawn_stress(sim.scheduler(), StressSpec{}, sim.now()).empty());
  EXPECT_TRUE(sim.scheduler().live_tasks().empty());
}

TEST(Stress, RoundRobinPlacementFromCpu0) {
  Simulator sim(quiet_scenario(3));
  StressSpec spec;
  spec.n_cpu_hogs = 2;
  spec.n_io_waiters = 3;
  const auto ids = spawn_stress(sim.scheduler(), spec, sim.now());
  ASSERT_EQ(ids.size(), 5u);
  const CpuId expected[] = {0, 1, 2, 0, 1};
  for (size_t i = 0; i < ids.size(); ++i) EXPECT_EQ(sim.scheduler().task(ids[i]).cpu, expected[i]);
}

TEST(Stress, HogsSaturateTheMachine) {
  Scenario s = quiet_scenario(4, 2'000'000);
  s.stress.n_cpu_hogs = 8;
  Simulator sim(s);
  sim.run();
  EXPECT_GT(sim.scheduler().avg_utilization(), 95.0);
}

TEST(Stress, TenPercentWaitersAverageTenPercent) {
  Scenario s = quiet_scenario(4, 2'000'000);
  s.stress.n_io_waiters = 4;
  s.stress.waiter_burst_us = Distribution::constant(1000);
  s.stress.waiter_block_us = Distribution::constant(9000);
  Simulator sim(s);
  sim.run();
  EXPECT_NEAR(sim.scheduler().avg_utilization(), 10.0, 3.0);
}

TEST(Arrivals, GapWithinHalfToOneAndAHalfMean) {
  StressSpec spec;
  spec.spawn_rate = 4;
  Rng rng(3);
  for (int i = 0; i < 5000; ++i) {
    const SimTime at = next_arrival(spec, SimTime(1000), rng);
    EXPECT_GE(at.us, 1000 + 125'000);
    EXPECT_LE(at.us, 1000 + 375'000);
  }
}

TEST(Arrivals, SpawnedTasksExitAfterTheirLifetime) {
  Scenario s = quiet_scenario(2, 4'000'000);
  s.stress.spawn_rate = 10;
  s.stress.lifetime_us = Distribution::constant(200'000);
  Simulator sim(s);
  sim.run();
  // About 40 arrivals, each living 0.2 s, so only a handful remain.
  EXPECT_LE(sim.scheduler().live_tasks().size(), 4u);
  for (TaskId id : sim.scheduler().live_tasks()) EXPECT_EQ(sim.scheduler().task(id).cpu, 0);
}

}  // namespace
}  // namespace zonebal
