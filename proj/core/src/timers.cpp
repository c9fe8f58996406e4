#include "nekmini/timers.hpp"

#include <numeric>

namespace nekmini {

const char* to_string(TimerCat c) {
  switch (c) {
    case TimerCat::advection: return "advection";
    case TimerCat::pressure_preco: return "pressure-preco";
    case TimerCat::pressure_ax: return "pressure-Ax";
    case TimerCat::pressure_coarse: return "pressure-coarse";
    case TimerCat::fdm: return "FDM";
    case TimerCat::gather_scatter: return "gather-scatter";
    case TimerCat::viscous: return "viscous";
    case TimerCat::other: return "other";
  }
  return "?";
}

Timers::Timers() : last_(Clock::now()) {}

void Timers::charge() {
  const auto now = Clock::now();
  const TimerCat cur = stack_.empty() ? TimerCat::other : stack_.back();
  totals_[static_cast<int>(cur)] += std::chrono::duration<double>(now - last_).count();
  last_ = now;
}

void Timers::push(TimerCat c) {
  charge();
  stack_.push_back(c);
}

void Timers::pop() {
  charge();
  if (!stack_.empty()) stack_.pop_back();
}

void Timers::reset() {
  totals_.fill(0.0);
  stack_.clear();
  last_ = Clock::now();
}

double Timers::total() const { return std::accumulate(totals_.begin(), totals_.end(), 0.0); }

}  // namespace nekmini
