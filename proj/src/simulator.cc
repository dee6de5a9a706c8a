#include "zonebal/simulator.h"

#include "zonebal/baseline_balancer.h"
#include "zonebal/workload.h"
#include "zonebal/zone_balancer.h"

namespace zonebal {
namespace {

constexpr size_t kRecentEvents = 64;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

void mix(uint64_t& h, uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xff;
    h *= 0x100000001b3ULL;
  }
}

SchedConfig sched_config(const Scenario& s) {
  SchedConfig c;
  c.n_cpus = s.n_cpus;
  c.tick_us = s.tick_us;
  c.util_window_us = s.util_window_us;
  c.cache_penalty_us = s.cache_penalty_us;
  return c;
}

}  // namespace

std::unique_ptr<Balancer> make_balancer(const Scenario& s) {
  if (s.balancer == BalancerKind::kZone) return std::make_unique<ZoneBalancer>(s.zone, s.lock);
  return std::make_unique<BaselineBalancer>(s.baseline, s.lock, s.n_cpus);
}

Simulator::Simulator(const Scenario& scenario) : scenario_(scenario), rng_(scenario.seed) {
  scenario_.validate();
  sched_ = std::make_unique<Scheduler>(sched_config(scenario_), *this, metrics_, rng_);
  balancer_ = make_balancer(scenario_);

  const SimTime t0;
  if (scenario_.probe) spawn_probe(*sched_, *scenario_.probe, t0);
  spawn_stress(*sched_, scenario_.stress, t0);
  if (scenario_.stress.spawn_rate > 0) {
    post(next_arrival(scenario_.stress, t0, rng_), event::TaskCreate{0});
  }
  post(t0 + scenario_.tick_us, event::Tick{});
}

void Simulator::post(SimTime at, EventKind kind) { queue_.schedule(at, std::move(kind)); }

void Simulator::record(const Event& e) {
  ++dispatched_;
  mix(trace_hash_, static_cast<uint64_t>(e.at.us));
  mix(trace_hash_, e.seq);
  mix(trace_hash_, e.kind.index());
  std::visit(Overloaded{
                 [&](const event::TaskWakeup& w) { mix(trace_hash_, static_cast<uint64_t>(w.task)); },
                 [&](const event::BurstEnd& b) {
                   mix(trace_hash_, static_cast<uint64_t>(b.cpu));
                   mix(trace_hash_, b.token);
                 },
                 [&](const event::TaskCreate& c) { mix(trace_hash_, c.spawn_index); },
                 [&](const event::LockRelease& l) { mix(trace_hash_, static_cast<uint64_t>(l.cpu)); },
                 [](const auto&) {},
             },
             e.kind);
  recent_.push_back(describe(e));
  if (recent_.size() > kRecentEvents) recent_.pop_front();
}

void Simulator::dispatch(const Event& e) {
  const SimTime now = e.at;
  std::visit(
      Overloaded{
          [&](const event::Tick&) {
            sched_->on_tick(now);
            balancer_->on_tick(*sched_, now);
            post(now + scenario_.tick_us, event::Tick{});
          },
          [&](const event::TaskWakeup& w) {
            const CpuId cpu = balancer_->select_wakeup_cpu(*sched_, w.task, now);
            sched_->wake_task(w.task, cpu, now);
          },
          [&](const event::BurstEnd& b) { sched_->on_burst_end(b.cpu, b.token, now); },
          [&](const event::TaskCreate&) {
            const StressSpec& st = scenario_.stress;
            const TaskId id = sched_->create_task(spawned_task_spec(st, now, rng_), now);
            const CpuId cpu = balancer_->place_new_task(*sched_, id, st.spawn_cpu, now);
            sched_->start_task(id, cpu, now);
            post(next_arrival(st, now, rng_), event::TaskCreate{++spawned_});
          },
          [&](const event::LockRelease& l) { sched_->on_lock_release(l.cpu, now); },
          [&](const event::SimEnd&) { ended_ = true; },
      },
      e.kind);
}

void Simulator::step_until(SimTime end) {
  while (!queue_.empty() && queue_.top().at <= end) {
    const Event e = queue_.pop();
    record(e);
    dispatch(e);
    if (observer_) observer_(e, *this);
  }
  if (now() < end) queue_.advance_to(end);
}

const MetricsStore& Simulator::run_until(SimTime end) {
  step_until(end);
  post(end, event::SimEnd{});
  const Event e = queue_.pop();
  record(e);
  dispatch(e);
  if (observer_) observer_(e, *this);
  return metrics_;
}

RunArtifacts run_scenario(const Scenario& s) {
  Simulator sim(s);
  try {
    sim.run();
  } catch (const InvariantViolation& e) {
    throw SimulationFailure(e.what(), sim.recent_trace());
  }
  RunArtifacts out;
  out.report = make_report(sim.metrics(), scenario_hash(s), s.seed, policy_label(s));
  out.samples = sim.metrics().samples();
  out.trace_hash = sim.trace_hash();
  return out;
}

}  // namespace zonebal
