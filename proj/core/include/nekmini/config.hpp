#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nekmini/mesh.hpp"

namespace nekmini {

struct CaseConfig {
  std::string case_type = "flow";  // flow | poisson
  int ranks = 1;
  std::uint64_t seed = 1;

  Point3 origin{0.0, 0.0, 0.0};
  Point3 extent{1.0, 1.0, 1.0};
  std::array<int, 3> counts{2, 2, 2};
  int order = 4;
  std::array<BoundaryKind, 6> bc{BoundaryKind::dirichlet, BoundaryKind::dirichlet, BoundaryKind::dirichlet,
                                 BoundaryKind::dirichlet, BoundaryKind::dirichlet, BoundaryKind::dirichlet};
  std::string deform = "none";  // none | trilinear | sine
  double deform_amplitude = 0.1;

  std::string partition = "rsb";  // rsb | rcb

  double dt = 0.0;
  std::int64_t steps = 0;
  std::string scheme = "bdfext";  // bdfext | char
  int time_order = 2;
  int char_substeps = 1;

  double Re = 100.0;
  std::string ic = "zero";  // zero | taylor_green | file:<checkpoint>
  std::array<double, 3> forcing{0.0, 0.0, 0.0};

  std::string smoother = "cheby_asm";
  int cheby_degree = 2;
  int precision = 64;  // 64 | 32
  double pressure_tol = 1e-4;
  int pressure_max_iter = 200;
  double velocity_tol = 1e-6;
  int velocity_max_iter = 500;
  int projection_capacity = 8;

  std::string advection_variant = "auto";
  int nq = 0;  // 0: default

  double gs_latency_us = 1.0;
  double gs_bandwidth = 1000.0;
  std::string gs_strategy = "auto";  // auto | pairwise | crystal_router | all_reduce
  int gs_trials = 5;

  std::string report_window = "auto";  // auto | first-last

  // Effective configuration, one (key, value) pair per documented key.
  std::vector<std::pair<std::string, std::string>> echo() const;
};

// `key = value` lines with `#` comments. Unknown keys, type mismatches, invalid
// values and missing required keys raise ConfigError with the line number
// (0 for missing keys).
CaseConfig parse_config(const std::string& text);
CaseConfig load_config(const std::string& path);
// Applies one override ("key=value") on top of an existing config.
void set_config_value(CaseConfig& cfg, const std::string& key, const std::string& value);

// Markdown reference of every key with type, default and description.
std::string config_reference();

BoxSpec box_spec(const CaseConfig& cfg);

}  // namespace nekmini
