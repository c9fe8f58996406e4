#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "nekmini/timers.hpp"

namespace nekmini {

struct StepRecord {
  std::int64_t step = 0;
  double time = 0.0;
  double dt = 0.0;
  double cfl = 0.0;
  int v_iters = 0;
  int p_iters = 0;
  double div_rel = 0.0;
  double max_u = 0.0;
  double err = 0.0;
  double t_step = 0.0;  // wall seconds
};

struct RunReport {
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<StepRecord> steps;
  std::array<double, kTimerCats> timing{};
  std::string gs_strategy;
  std::string advection_variant;
  std::vector<int> ngh;
  std::int64_t edge_cut = 0;
  std::int64_t min_part = 0, max_part = 0;
  std::int64_t window_first = 0, window_last = 0;
  double t_step_avg = 0.0;
  std::int64_t grad_flops = 0, stiffness_flops = 0;

  // Poisson cases.
  int poisson_iters = 0;
  double poisson_error = 0.0;

  int exit_code = 0;  // 0 ok, 2 non-convergence or instability
  std::string failure;
  bool stopped_on_growth = false;

  // Final fields in global element order.
  std::array<std::vector<double>, 3> u;
  std::vector<double> p;
  double final_time = 0.0;
  std::int64_t final_step = 0;

  // Percentage of the timed total per category.
  std::array<double, kTimerCats> timing_percent() const;
};

// CSV report: echoed configuration as comments, one row per step, then a
// timing table. Wall-clock columns are t_step and the timing section.
void write_report_csv(std::ostream& out, const RunReport& r);
// The same report with every wall-clock value omitted.
std::string numeric_report(const RunReport& r);

}  // namespace nekmini
