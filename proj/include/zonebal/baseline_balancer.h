#ifndef ZONEBAL_BASELINE_BALANCER_H_
#define ZONEBAL_BASELINE_BALANCER_H_

#include <cstdint>
#include <vector>

#include "zonebal/balancer.h"
#include "zonebal/migration.h"

namespace zonebal {

struct DomainConfig {
  int64_t balance_interval_idle_us = 10000;
  int64_t balance_interval_busy_us = 100000;
  int imbalance_pct = 25;
  int max_move_per_balance = 1;

  void validate() const;
};

// Periodic pull balancer over one flat domain: every CPU re-checks the
// domain on its own interval (short while idle, long while busy) and pulls
// from the busiest run queue when that queue's load exceeds the domain
// average by more than imbalance_pct.
class BaselineBalancer : public Balancer {
 public:
  BaselineBalancer(const DomainConfig& domain, const LockCostModel& cost, int n_cpus);

  std::string policy_name() const override { return "baseline"; }
  void on_tick(Scheduler& sched, SimTime now) override;
  CpuId place_new_task(Scheduler& sched, TaskId id, CpuId creator, SimTime now) override;
  CpuId select_wakeup_cpu(Scheduler& sched, TaskId id, SimTime now) override;

  // Returns whether load_balance ran.
  bool rebalance_tick(Scheduler& sched, CpuId cpu, SimTime now);
  BalanceOutcome load_balance(Scheduler& sched, const LoadSnapshot& loads, CpuId cpu, SimTime now);

  // The imbalance test on its own: busiest load above avg * (1 + pct/100).
  static bool imbalanced(double busiest_load, double avg, int imbalance_pct);

  int64_t interval_for(IdleState s) const {
    return s == IdleState::kSchedIdle ? domain_.balance_interval_idle_us
                                      : domain_.balance_interval_busy_us;
  }
  SimTime last_balance(CpuId cpu) const { return last_balance_.at(cpu); }

 private:
  DomainConfig domain_;
  LockCostModel cost_;
  std::vector<SimTime> last_balance_;
};

}  // namespace zonebal

#endif  // ZONEBAL_BASELINE_BALANCER_H_
