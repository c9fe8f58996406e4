#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nekmini/config.hpp"
#include "nekmini/report.hpp"

namespace nekmini {

struct RunOptions {
  int ranks = 0;                   // 0: use the config
  std::string report_path;         // CSV report, when set
  std::string checkpoint_path;     // final state, when set
  double growth_limit = 0.0;       // stop once max|u| exceeds this multiple of the initial value
  std::function<void(const StepRecord&)> on_step;
};

// Builds the mesh, partitions it, launches the simulated ranks and runs the case.
// Solver failures are reported through exit_code/failure rather than thrown.
RunReport run_case(const CaseConfig& cfg, const RunOptions& opt = {});

struct StudyResult {
  std::string axis;
  std::vector<double> values;
  std::vector<double> errors;
  double slope = 0.0;  // d log(err) / dN, or d log(err) / d log(dt)
};

// Runs the case for each value of `axis` ("N" or "dt"; dt keeps the final time).
StudyResult convergence_study(const CaseConfig& base, const std::string& axis, const std::vector<double>& values);

// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace nekmini
