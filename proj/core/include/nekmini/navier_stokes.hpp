#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "nekmini/advection.hpp"
#include "nekmini/krylov.hpp"
#include "nekmini/multigrid.hpp"
#include "nekmini/projection.hpp"
#include "nekmini/space.hpp"
#include "nekmini/time_coeffs.hpp"

namespace nekmini {

using Vec3Field = std::array<std::vector<double>, 3>;

enum class TimeScheme { bdfext, characteristics };
const char* to_string(TimeScheme s);

struct FlowConfig {
  double dt = 1e-3;
  double Re = 100.0;
  int order = 2;
  TimeScheme scheme = TimeScheme::bdfext;
  int char_substeps = 1;
  int char_max_substeps = 64;
  double pressure_tol = 1e-4;
  int pressure_max_iter = 200;
  double velocity_tol = 1e-6;
  int velocity_max_iter = 500;
  AdvectionVariant variant = AdvectionVariant::blocked2d;
  std::array<double, 3> forcing{0.0, 0.0, 0.0};
};

// Velocity history hist[j] = u^{n-1-j} (hist[0] is the current velocity).
struct FlowState {
  std::vector<Vec3Field> hist;
  std::vector<double> p;
  double t = 0.0;
  std::int64_t step = 0;
  std::vector<Vec3Field> adv;  // weak advection terms of hist entries, when cached
  const Vec3Field& u() const { return hist.front(); }
};

struct StepStats {
  int v_iters = 0;  // max over the three components
  int p_iters = 0;
  double cfl = 0.0;
  double div_rel = 0.0;
  double max_u = 0.0;
};

// Courant number dt * max |u.d| / |d|^2 over gridpoints, d the vector to the
// adjacent GLL point along each local direction (global max).
double compute_cfl(Space& space, const Vec3Field& u, double dt);

// Max over points of |u| (global).
double max_velocity(Space& space, const Vec3Field& u);

// Splitting time stepper on a shared velocity/pressure space.
class FlowSolver {
 public:
  FlowSolver(Space& space, Multigrid& pressure_mg, const DealiasOperator& adv, const FlowConfig& cfg,
             int projection_capacity = 8);

  const FlowConfig& config() const { return cfg_; }
  Space& space() { return *space_; }

  // Advances one step. Throws on solver failure, leaving state untouched.
  StepStats step(FlowState& state);

  // Substeps, exposed for tests.
  Vec3Field advect_bdfext(FlowState& state, const TimeCoeffs& c);
  Vec3Field advect_characteristics(FlowState& state, const TimeCoeffs& c);
  // Strong field from an unassembled weak field: QQ^T w / QQ^T B.
  void weak_to_strong(std::span<double> w);
  // Assembled weak divergence (grad q, v).
  std::vector<double> weak_divergence(const Vec3Field& v);
  std::vector<double> pressure_rhs(const Vec3Field& ustar, const Vec3Field& uext, double dt);
  SolveResult solve_pressure(std::span<const double> b, std::span<double> p);
  // Helmholtz ((1/Re) A + (beta0/dt) B) u = QQ^T B u** / dt per component.
  int viscous_solve(const Vec3Field& u_corr, const Vec3Field& guess, double beta0, Vec3Field& out);
  // Weak advection term C(u) w for each component of w, unassembled.
  Vec3Field advection_term(const DealiasOperator::Contravariant& c, const Vec3Field& w);
  // Assembled weak divergence relative to the assembled sum of its absolute local contributions.
  double divergence_ratio(const Vec3Field& v);
  ProjectionSpace& projection() { return proj_; }
  AdvectionVariant variant() const { return cfg_.variant; }

 private:
  Space* space_;
  Multigrid* mg_;
  const DealiasOperator* adv_;
  FlowConfig cfg_;
  ProjectionSpace proj_;
  std::vector<double> inv_mass_;  // 1 / QQ^T B
  double diag_h2_ = -1.0;
  std::vector<double> vel_diag_;
};

// Two-dimensional Taylor-Green vortex embedded in 3D: returns (u, v, 0).
std::array<double, 3> taylor_green(double x, double y, double t, double Re);

}  // namespace nekmini
