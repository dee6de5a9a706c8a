#include "zonebal/task.h"

#include <stdexcept>
#include <string>

namespace zonebal {

void BehaviorScript::validate() const {
  if (phases.empty()) throw std::invalid_argument("behavior has no phases");
  for (size_t i = 0; i < phases.size(); ++i) {
    const Phase& p = phases[i];
    for (const Distribution* d : {&p.burst_us, &p.block_us}) {
      if (d->lo < 0 || d->hi < d->lo) {
        throw std::invalid_argument("phase " + std::to_string(i) +
                                    ": bad distribution bounds");
      }
    }
    if (p.burst_us.lo == 0 && p.block_us.lo == 0) {
      throw std::invalid_argument("phase " + std::to_string(i) +
                                  ": burst and block may both be zero");
    }
  }
}

}  // namespace zonebal
