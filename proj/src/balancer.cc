#include "zonebal/balancer.h"

#include <numeric>

namespace zonebal {

double LoadSnapshot::average() const {
  if (cpu_util.empty()) return 0.0;
  return std::accumulate(cpu_util.begin(), cpu_util.end(), 0.0) /
         static_cast<double>(cpu_util.size());
}

double LoadSnapshot::max() const {
  double m = 0.0;
  for (double u : cpu_util) m = std::max(m, u);
  return m;
}

std::optional<CpuId> find_busiest_queue(std::span<const double> loads) {
  std::optional<CpuId> best;
  for (size_t c = 0; c < loads.size(); ++c) {
    if (loads[c] <= 0.0) continue;
    if (!best || loads[c] > loads[*best]) best = static_cast<CpuId>(c);
  }
  return best;
}

std::optional<CpuId> LoadSnapshot::busiest() const { return find_busiest_queue(cpu_util); }

std::optional<CpuId> LoadSnapshot::least_loaded(std::optional<CpuId> exclude) const {
  std::optional<CpuId> best;
  for (size_t c = 0; c < cpu_util.size(); ++c) {
    const auto id = static_cast<CpuId>(c);
    if (exclude && *exclude == id) continue;
    if (!best || cpu_util[c] < cpu_util[*best]) best = id;
  }
  return best;
}

}  // namespace zonebal
