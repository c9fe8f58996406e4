#include "nekmini/report.hpp"

#include <cstdio>
#include <numeric>
#include <ostream>
#include <sstream>

namespace nekmini {

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10e", x);
  return buf;
}

void write(std::ostream& out, const RunReport& r, bool wall) {
  out << "# nekmini run report\n";
  for (const auto& [k, v] : r.config) out << "# " << k << " = " << v << "\n";
  out << "# gs_strategy = " << r.gs_strategy << "\n";
  out << "# advection_variant = " << r.advection_variant << "\n";
  out << "# partition edge_cut = " << r.edge_cut << ", parts min/max = " << r.min_part << "/" << r.max_part
      << ", ngh =";
  for (int n : r.ngh) out << " " << n;
  out << "\n";
  out << "# flops grad = " << r.grad_flops << ", stiffness = " << r.stiffness_flops << "\n";
  if (!r.failure.empty()) out << "# failure = " << r.failure << "\n";
  if (r.stopped_on_growth) out << "# stopped = velocity growth limit\n";
  out << "step,time,dt,cfl,v_iters,p_iters,div_rel,max_u,err" << (wall ? ",t_step" : "") << "\n";
  for (const auto& s : r.steps) {
    out << s.step << "," << num(s.time) << "," << num(s.dt) << "," << num(s.cfl) << "," << s.v_iters << ","
        << s.p_iters << "," << num(s.div_rel) << "," << num(s.max_u) << "," << num(s.err);
    if (wall) out << "," << num(s.t_step);
    out << "\n";
  }
  if (r.poisson_iters > 0 || r.poisson_error > 0.0)
    out << "# poisson iterations = " << r.poisson_iters << ", max error = " << num(r.poisson_error) << "\n";
  if (wall) {
    out << "\n# t_step average over steps " << r.window_first << "-" << r.window_last << " = " << num(r.t_step_avg)
        << "\n";
    out << "category,seconds,percent\n";
    const auto pct = r.timing_percent();
    for (int c = 0; c < kTimerCats; ++c)
      out << to_string(static_cast<TimerCat>(c)) << "," << num(r.timing[c]) << "," << num(pct[c]) << "\n";
  }
}

}  // namespace

std::array<double, kTimerCats> RunReport::timing_percent() const {
  std::array<double, kTimerCats> p{};
  const double total = std::accumulate(timing.begin(), timing.end(), 0.0);
  if (total <= 0.0) {
    p[static_cast<int>(TimerCat::other)] = 100.0;
    return p;
  }
  for (int c = 0; c < kTimerCats; ++c) p[c] = 100.0 * timing[c] / total;
  return p;
}

void write_report_csv(std::ostream& out, const RunReport& r) { write(out, r, true); }

std::string numeric_report(const RunReport& r) {
  std::ostringstream o;
  write(o, r, false);
  return o.str();
}

}  // namespace nekmini
