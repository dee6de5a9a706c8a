#include "zonebal/baseline_balancer.h"

#include <stdexcept>

namespace zonebal {

void DomainConfig::validate() const {
  if (balance_interval_idle_us <= 0 || balance_interval_busy_us <= 0) {
    throw std::invalid_argument("balance intervals must be positive");
  }
  if (balance_interval_idle_us > balance_interval_busy_us) {
    throw std::invalid_argument("idle balance interval exceeds busy interval");
  }
  if (imbalance_pct <= 0) throw std::invalid_argument("imbalance_pct must be positive");
  if (max_move_per_balance < 1) throw std::invalid_argument("max_move_per_balance must be >= 1");
}

BaselineBalancer::BaselineBalancer(const DomainConfig& domain, const LockCostModel& cost,
                                   int n_cpus)
    : domain_(domain), cost_(cost), last_balance_(n_cpus) {
  domain_.validate();
}

bool BaselineBalancer::imbalanced(double busiest_load, double avg, int imbalance_pct) {
  // busiest > avg * (100 + pct) / 100, kept multiplicative.
  return busiest_load * 100.0 > avg * static_cast<double>(100 + imbalance_pct);
}

void BaselineBalancer::on_tick(Scheduler& sched, SimTime now) {
  for (CpuId c = 0; c < sched.n_cpus(); ++c) rebalance_tick(sched, c, now);
}

bool BaselineBalancer::rebalance_tick(Scheduler& sched, CpuId cpu, SimTime now) {
  const int64_t interval = interval_for(sched.runqueue(cpu).idle_state());
  if (now - last_balance_.at(cpu) < interval) return false;
  last_balance_[cpu] = now;
  load_balance(sched, LoadSnapshot::of(sched), cpu, now);
  return true;
}

BalanceOutcome BaselineBalancer::load_balance(Scheduler& sched, const LoadSnapshot& loads,
                                              CpuId cpu, SimTime now) {
  sched.metrics().record_check();
  BalanceOutcome out;
  const auto busiest = loads.busiest();
  if (!busiest || *busiest == cpu) return out;
  const double busiest_load = loads.cpu_util[*busiest];
  if (!imbalanced(busiest_load, loads.average(), domain_.imbalance_pct)) return out;
  if (loads.cpu_util[cpu] >= busiest_load) return out;
  out.migrated = move_tasks(sched, cost_, *busiest, cpu, domain_.max_move_per_balance, now,
                            Trigger::kPeriodic);
  out.checked_only = out.migrated == 0;
  return out;
}

CpuId BaselineBalancer::place_new_task(Scheduler& sched, TaskId id, CpuId creator, SimTime) {
  const Task& t = sched.task(id);
  return t.affinity ? *t.affinity : creator;
}

CpuId BaselineBalancer::select_wakeup_cpu(Scheduler& sched, TaskId id, SimTime) {
  return sched.task(id).cpu;
}

}  // namespace zonebal
