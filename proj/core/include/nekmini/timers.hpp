#pragma once

#include <array>
#include <chrono>
#include <string>
#include <vector>

namespace nekmini {

enum class TimerCat { advection, pressure_preco, pressure_ax, pressure_coarse, fdm, gather_scatter, viscous, other };
inline constexpr int kTimerCats = 8;
const char* to_string(TimerCat c);

// Exclusive wall-clock accounting: time is charged to the innermost open category.
class Timers {
 public:
  Timers();
  void push(TimerCat c);
  void pop();
  void reset();
  double seconds(TimerCat c) const { return totals_[static_cast<int>(c)]; }
  double total() const;
  const std::array<double, kTimerCats>& totals() const { return totals_; }

 private:
  using Clock = std::chrono::steady_clock;
  void charge();
  std::array<double, kTimerCats> totals_{};
  std::vector<TimerCat> stack_;
  Clock::time_point last_;
};

class TimerScope {
 public:
  TimerScope(Timers* t, TimerCat c) : t_(t) {
    if (t_) t_->push(c);
  }
  ~TimerScope() {
    if (t_) t_->pop();
  }
  TimerScope(const TimerScope&) = delete;
  TimerScope& operator=(const TimerScope&) = delete;

 private:
  Timers* t_;
};

}  // namespace nekmini
