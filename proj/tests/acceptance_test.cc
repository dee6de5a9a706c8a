// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "zonebal/cli.h"
#include "zonebal/migration.h"
#include "zonebal/scenario.h"
#include "zonebal/simulator.h"
#include "zonebal/zone_balancer.h"

namespace {

using namespace zonebal;
namespace fs = std::filesystem;

std::string scenario_path(const std::string& name) {
  return std::string(ZONEBAL_SCENARIO_DIR) + "/" + name;
}

struct Check {
  bool ok = true;
  std::ostringstream why;

  void expect(bool cond, const std::string& msg) {
    if (!cond && ok) {
      ok = false;
      why << msg;
    }
  }
};

// Shared between criteria 1 and 6 so the desk-scale runs happen once.
struct DeskRuns {
  RunArtifacts baseline;
  RunArtifacts warm_high;
  double wall_s = 0;
};

DeskRuns& desk() {
  static DeskRuns runs = [] {
    DeskRuns r;
    Scenario s = load_scenario(scenario_path("desk_scale.json"));
    const auto t0 = std::chrono::steady_clock::now();
    apply_policy(s, "baseline");
    r.baseline = run_scenario(s);
    apply_policy(s, "zone:warm_high");
    r.warm_high = run_scenario(s);
    r.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
  }();
  return runs;
}

void latency_reduction(Check& c) {
  const DeskRuns& r = desk();
  const auto& b = r.baseline.report;
  const auto& z = r.warm_high.report;
  c.expect(b.latency.mean_us && z.latency.mean_us, "no latency samples");
  if (!c.ok) return;
  std::ostringstream detail;
  detail << "baseline mean " << *b.latency.mean_us << " us, " << b.migrations << " migrations; warm_high mean "
         << *z.latency.mean_us << " us, " << z.migrations << " migrations; both runs " << r.wall_s << " s";
  c.expect(*z.latency.mean_us <= 0.67 * *b.latency.mean_us, "latency not reduced: " + detail.str());
  c.expect(z.migrations < b.migrations, "migrations not reduced: " + detail.str());
  c.expect(r.wall_s < 60.0, "too slow: " + detail.str());
  if (c.ok) c.why << detail.str();
}

void worked_example(Check& c) {
  Scenario s;
  s.n_cpus = 4;
  s.baseline.balance_interval_idle_us = int64_t{1} << 50;
  s.baseline.balance_interval_busy_us = int64_t{1} << 50;
  Simulator sim(s);
  Scheduler& sched = sim.scheduler();
  TaskSpec spec;
  spec.behavior.phases = {Phase{Distribution::constant(1'000'000), Distribution::constant(1000)}};
  for (int i = 0; i < 3; ++i) {
    const TaskId id = sched.create_task(spec, sim.now());
    sched.start_task(id, 1, sim.now());
    sched.mutable_task(id).usage_pct = 60;
  }
  ZoneConfig cfg;
  cfg.policy = ZonePolicy::warm(Spot::kMid);
  cfg.balance_cpus_avg_enable = true;
  ZoneBalancer z(cfg, s.lock);
  const LoadSnapshot loads{{50, 85, 25, 55}};
  const auto res = z.on_trigger(trigger::TickBusiestMember{1}, sched, loads, sim.now());
  const auto& ops = sim.metrics().migration_ops();
  c.expect(res.outcome.migrated == 1, "expected exactly one task moved");
  c.expect(ops.size() == 1, "expected one migration op");
  if (c.ok) c.expect(ops[0].src == 1 && ops[0].dst == 2, "wrong source or target CPU");
  if (c.ok) c.why << "gate input " << z.gate_input(loads) << ", CPU1 -> CPU2, 1 task";
}

void cold_silence(Check& c) {
  Scenario s = load_scenario(scenario_path("light_load.json"));
  apply_policy(s, "zone:cold");
  Simulator cold(s);
  cold.run();
  apply_policy(s, "baseline");
  Simulator base(s);
  base.run();
  c.expect(cold.metrics().max_utilization() <= 30.0 && base.metrics().max_utilization() <= 30.0,
           "light load exceeded 30% utilization");
  c.expect(cold.metrics().ledger().migrations == 0, "cold policy migrated");
  c.expect(cold.metrics().ledger().direct_checks > 0, "cold policy recorded no checks");
  c.expect(base.metrics().ledger().direct_checks > 0, "baseline recorded no checks");
  if (c.ok) {
    c.why << "max util " << cold.metrics().max_utilization() << "%, checks cold "
          << cold.metrics().ledger().direct_checks << " baseline " << base.metrics().ledger().direct_checks;
  }
}

void gate_monotonicity(Check& c) {
  Rng rng(0x9a7e);
  const ZonePolicy chain[] = {ZonePolicy::hot(), ZonePolicy::warm(Spot::kHigh), ZonePolicy::warm(Spot::kMid),
                              ZonePolicy::warm(Spot::kLow)};
  int counterexamples = 0;
  for (int i = 0; i < 10'000; ++i) {
    LoadSnapshot loads;
    const int n = static_cast<int>(rng.uniform(1, 16));
    for (int k = 0; k < n; ++k) loads.cpu_util.push_back(static_cast<double>(rng.uniform(0, 10'000)) / 100.0);
    const bool avg = rng.uniform(0, 1) == 1;
    bool prev = true;
    for (size_t p = 0; p < std::size(chain); ++p) {
      ZoneConfig cfg;
      cfg.policy = chain[p];
      cfg.balance_cpus_avg_enable = avg;
      const bool g = ZoneBalancer(cfg, LockCostModel{}).gate(loads);
      if (p > 0 && prev && !g) ++counterexamples;
      prev = g;
    }
  }
  c.expect(counterexamples == 0, std::to_string(counterexamples) + " counterexamples");
  if (c.ok) c.why << "10000 states, 0 counterexamples";
}

int run_episode(int64_t high_ms) {
  ZoneConfig cfg;
  cfg.policy = ZonePolicy::warm(Spot::kMid);
  WeightState w;
  int64_t t = 1000;
  for (int64_t i = 0; i < high_ms; ++i, t += 1000) update_weight(w, 90, 50, SimTime(t), cfg);
  update_weight(w, 10, 50, SimTime(t), cfg);
  return w.score;
}

void weight_mechanics(Check& c) {
  const int five = run_episode(5000);
  const int two = run_episode(2000);
  c.expect(five == -5, "5 s episode gave " + std::to_string(five));
  c.expect(two == 5, "2 s episode gave " + std::to_string(two));
  Rng rng(77);
  int bad = 0;
  for (int i = 0; i < 10'000; ++i) {
    const double usage = static_cast<double>(rng.uniform(0, 10'000)) / 100.0;
    const int score = static_cast<int>(rng.uniform(-kMaxWeightMagnitude, kMaxWeightMagnitude));
    const double e = effective_usage(usage, score);
    const double expect = std::clamp(usage + score, 30.0, 80.0);
    if (e < 30.0 || e > 80.0 || e != expect) ++bad;
  }
  c.expect(bad == 0, std::to_string(bad) + " clamp violations");
  if (c.ok) c.why << "5 s -> " << five << ", 2 s -> +" << two << ", 10000 clamp pairs";
}

int64_t expected_lock_hold(const MetricsStore& m, const LockCostModel& cost) {
  int64_t sum = 0;
  for (const auto& op : m.migration_ops()) sum += (cost.lock_base_us + cost.per_task_us * op.moved) * 2;
  return sum;
}

void lock_identity(Check& c) {
  Scenario s = load_scenario(scenario_path("desk_scale.json"));
  s.duration_us = 10'000'000;
  std::vector<std::pair<std::string, Scenario>> runs;
  for (const char* p : {"baseline", "zone:hot", "zone:warm_low", "zone:cold"}) {
    Scenario v = s;
    apply_policy(v, p);
    runs.emplace_back(p, v);
  }
  Scenario multi = s;
  multi.baseline.max_move_per_balance = 3;
  multi.stress.n_cpu_hogs = 6;
  multi.lock = LockCostModel{45, 15};
  runs.emplace_back("baseline x3", multi);

  uint64_t ops = 0;
  for (const auto& [name, sc] : runs) {
    Simulator sim(sc);
    sim.run();
    const auto& l = sim.metrics().ledger();
    const int64_t want = expected_lock_hold(sim.metrics(), sc.lock);
    ops += sim.metrics().migration_ops().size();
    c.expect(l.lock_hold_total_us == want, name + ": ledger " + std::to_string(l.lock_hold_total_us) +
                                               " != " + std::to_string(want));
  }
  const DeskRuns& d = desk();
  c.expect(d.baseline.report.lock_hold_total_us ==
               int64_t(d.baseline.report.migrations) * 2 * (s.lock.lock_base_us + s.lock.per_task_us),
           "desk baseline identity");
  if (c.ok) c.why << runs.size() + 1 << " runs, " << ops << " ops, exact";
}

void conservation_fuzz(Check& c) {
  constexpr uint64_t kEvents = 1'000'000;
  for (const char* policy : {"baseline", "zone:hot"}) {
    Scenario s;
    s.n_cpus = 6;
    s.seed = 0xf022;
    s.duration_us = 3'600'000'000;
    s.probe = ProbeSpec{500, 2};
    s.stress.n_cpu_hogs = 5;
    s.stress.n_io_waiters = 20;
    s.stress.spawn_rate = 40;
    s.stress.spawn_cpu = 3;
    s.stress.waiter_burst_us = Distribution::uniform(10, 3000);
    s.stress.waiter_block_us = Distribution::uniform(100, 8000);
    apply_policy(s, policy);
    Simulator sim(s);

    uint64_t violations = 0;
    std::string first;
    size_t seen_samples = 0;
    sim.set_observer([&](const Event& e, Simulator& sm) {
      const Scheduler& sched = sm.scheduler();
      std::vector<std::string> v = sched.check_invariants(e.at);
      for (TaskId id : sched.live_tasks()) {
        const Task& t = sched.task(id);
        if (t.affinity && t.cpu != *t.affinity) v.push_back("pinned task " + std::to_string(id) + " moved");
      }
      const auto& samples = sm.metrics().samples();
      for (; seen_samples < samples.size(); ++seen_samples) {
        if (samples[seen_samples].latency_us() < 0) v.push_back("negative latency");
      }
      if (!v.empty() && first.empty()) first = describe(e) + ": " + v.front();
      violations += v.size();
    });
    while (sim.events_dispatched() < kEvents) {
      sim.step_until(sim.now() + 100'000);
    }
    c.expect(violations == 0, std::string(policy) + ": " + std::to_string(violations) + " violations, first " + first);
    if (c.ok) c.why << policy << " " << sim.events_dispatched() << " events; ";
  }
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void determinism(Check& c) {
  const fs::path root = fs::temp_directory_path() / "zonebal_acceptance_det";
  fs::remove_all(root);
  const std::string scen = scenario_path("desk_scale.json");
  for (const char* sub : {"a", "b"}) {
    const std::string out = (root / sub).string();
    const char* argv[] = {"zonebal", "run", scen.c_str(), "--policy", "zone:warm_mid", "-o", out.c_str()};
    std::ostringstream o, e;
    const int code = cli::main(7, argv, o, e);
    c.expect(code == 0, "run failed: " + e.str());
  }
  for (const char* f : {"samples.csv", "summary.json"}) {
    const std::string a = slurp(root / "a" / f);
    c.expect(!a.empty() && a == slurp(root / "b" / f), std::string(f) + " differs");
  }
  if (c.ok) c.why << "samples.csv and summary.json byte-identical";
  fs::remove_all(root);
}

// Replays the recorded lock intervals: a wakeup inside a window on its CPU
// waits for the rest of that window.
int64_t replay_oracle(const MetricsStore& m, const LatencySample& s) {
  int64_t wait = 0;
  for (const auto& iv : m.ledger().nonpreemptible_intervals) {
    if (iv.cpu == s.cpu && iv.start <= s.wake_time && s.wake_time < iv.end) {
      wait = std::max(wait, iv.end - s.wake_time);
    }
  }
  return wait;
}

void latency_composition(Check& c) {
  for (int64_t lock_at : {980, 1000, 960}) {
    Scenario s;
    s.n_cpus = 2;
    s.duration_us = 5000;
    s.probe = ProbeSpec{1000, 0};
    s.lock = LockCostModel{30, 20};
    s.baseline.balance_interval_idle_us = int64_t{1} << 50;
    s.baseline.balance_interval_busy_us = int64_t{1} << 50;
    Simulator sim(s);
    Scheduler& sched = sim.scheduler();
    TaskSpec spec;
    spec.behavior.phases = {Phase{Distribution::constant(1'000'000), Distribution::constant(1)}};
    for (int i = 0; i < 2; ++i) sched.start_task(sched.create_task(spec, sim.now()), 1, sim.now());
    // Open the window before any event at lock_at is dispatched.
    sim.step_until(SimTime(lock_at - 1));
    if (move_tasks(sched, s.lock, 1, 0, 1, SimTime(lock_at), Trigger::kManual) != 1) {
      c.expect(false, "crafted migration refused");
      return;
    }
    sim.run();
    const auto& samples = sim.metrics().samples();
    const auto it = std::find_if(samples.begin(), samples.end(),
                                 [](const LatencySample& x) { return x.wake_time == SimTime(1000); });
    if (it == samples.end()) {
      c.expect(false, "no sample at 1000");
      return;
    }
    const int64_t oracle = replay_oracle(sim.metrics(), *it);
    const int64_t remaining = lock_at + 50 - 1000;
    c.expect(oracle == remaining, "oracle " + std::to_string(oracle) + " != remaining " + std::to_string(remaining));
    c.expect(it->latency_us() == oracle, "window at " + std::to_string(lock_at) + ": sample " +
                                             std::to_string(it->latency_us()) + " != oracle " +
                                             std::to_string(oracle));
    for (const auto& x : samples) {
      if (x.wake_time != SimTime(1000)) c.expect(x.latency_us() == 0, "unrelated sample delayed");
    }
    if (c.ok) c.why << "window@" << lock_at << " -> " << it->latency_us() << " us; ";
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Check&)>>> criteria = {
      {"latency reduction on desk-scale scenario", latency_reduction},
      {"warm_mid worked example", worked_example},
      {"cold-zone silence", cold_silence},
      {"gating monotonicity", gate_monotonicity},
      {"weight-score mechanics", weight_mechanics},
      {"lock accounting identity", lock_identity},
      {"conservation fuzz", conservation_fuzz},
      {"determinism", determinism},
      {"probe-latency composition", latency_composition},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    std::printf("%s %zu %s: %s\n", c.ok ? "PASS" : "FAIL", i + 1, criteria[i].first, c.why.str().c_str());
    std::fflush(stdout);
    if (!c.ok) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
