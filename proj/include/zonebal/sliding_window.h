#ifndef ZONEBAL_SLIDING_WINDOW_H_
#define ZONEBAL_SLIDING_WINDOW_H_

#include <cstddef>
#include <cstdint>
#include <vector>

namespace zonebal {

// Fixed-capacity ring of per-tick amounts with a running sum. Starts filled
// with zeros so a young window reads as "nothing happened yet".
class SlidingWindow {
 public:
  explicit SlidingWindow(size_t capacity) : slots_(capacity, 0) {}

  void push(int64_t v) {
    sum_ += v - slots_[head_];
    slots_[head_] = v;
    head_ = (head_ + 1) % slots_.size();
  }

  int64_t sum() const { return sum_; }
  size_t capacity() const { return slots_.size(); }

 private:
  std::vector<int64_t> slots_;
  size_t head_ = 0;
  int64_t sum_ = 0;
};

}  // namespace zonebal

#endif  // ZONEBAL_SLIDING_WINDOW_H_
