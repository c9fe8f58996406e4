#include "nekmini/navier_stokes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "nekmini/error.hpp"

namespace nekmini {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

}  // namespace

const char* to_string(TimeScheme s) { return s == TimeScheme::bdfext ? "bdfext" : "char"; }

std::array<double, 3> taylor_green(double x, double y, double t, double Re) {
  const double decay = std::exp(-2.0 * t / Re);
  return {std::sin(x) * std::cos(y) * decay, -std::cos(x) * std::sin(y) * decay, 0.0};
}

double compute_cfl(Space& space, const Vec3Field& u, double dt) {
  const Mesh& m = space.mesh();
  const int n1 = m.order + 1, npe = m.points_per_element();
  double cmax = 0.0;
  for (std::int64_t e = 0; e < m.num_elements; ++e)
    for (int k = 0; k < n1; ++k)
      for (int j = 0; j < n1; ++j)
        for (int i = 0; i < n1; ++i) {
          const size_t q = e * npe + i + n1 * (j + n1 * k);
          const int idx[3] = {i, j, k};
          for (int d = 0; d < 3; ++d) {
            int nb[3] = {i, j, k};
            nb[d] = idx[d] < n1 - 1 ? idx[d] + 1 : idx[d] - 1;
            const size_t r = e * npe + nb[0] + n1 * (nb[1] + n1 * nb[2]);
            const double dx = m.x[r] - m.x[q], dy = m.y[r] - m.y[q], dz = m.z[r] - m.z[q];
            const double d2 = dx * dx + dy * dy + dz * dz;
            const double ud = u[0][q] * dx + u[1][q] * dy + u[2][q] * dz;
            cmax = std::max(cmax, std::abs(ud) / d2);
          }
        }
  return dt * space.comm().allreduce_max(cmax);
}

double max_velocity(Space& space, const Vec3Field& u) {
  double mx = 0.0;
  for (size_t i = 0; i < u[0].size(); ++i)
    mx = std::max(mx, std::sqrt(u[0][i] * u[0][i] + u[1][i] * u[1][i] + u[2][i] * u[2][i]));
  return space.comm().allreduce_max(mx);
}

FlowSolver::FlowSolver(Space& space, Multigrid& pressure_mg, const DealiasOperator& adv, const FlowConfig& cfg,
                       int projection_capacity)
    : space_(&space), mg_(&pressure_mg), adv_(&adv), cfg_(cfg), proj_(projection_capacity) {
  if (cfg.Re <= 0.0) throw ContractError("Reynolds number must be positive");
  if (cfg.dt <= 0.0) throw ContractError("time step must be positive");
  if (cfg.scheme == TimeScheme::characteristics && cfg.order > 2)
    throw ContractError("characteristics supports time order <= 2");
  if (cfg.variant == AdvectionVariant::automatic)
    throw ContractError("FlowSolver: resolve the advection variant before constructing the solver");
  std::vector<double> b(space.mesh().mass);
  space.assemble<double>(b);
  inv_mass_.resize(b.size());
  for (size_t i = 0; i < b.size(); ++i) inv_mass_[i] = 1.0 / b[i];
}

void FlowSolver::weak_to_strong(std::span<double> w) {
  space_->assemble<double>(w);
  for (size_t i = 0; i < w.size(); ++i) w[i] *= inv_mass_[i];
}

Vec3Field FlowSolver::advection_term(const DealiasOperator::Contravariant& c, const Vec3Field& w) {
  TimerScope ts(space_->timers(), TimerCat::advection);
  Vec3Field out;
  KernelCounters* kc = space_->counters() ? &space_->counters()->advection : nullptr;
  for (int p = 0; p < 3; ++p) {
    out[p].resize(space_->size());
    adv_->apply(c, w[p], out[p], cfg_.variant, kc);
  }
  return out;
}

Vec3Field FlowSolver::advect_bdfext(FlowState& st, const TimeCoeffs& c) {
  const int k = c.order;
  const size_t n = space_->size();
  if (static_cast<int>(st.hist.size()) < k) throw ContractError("advection: missing velocity history");
  st.adv.resize(st.hist.size());
  for (int j = 0; j < k; ++j)
    if (st.adv[j][0].empty()) {
      TimerScope ts(space_->timers(), TimerCat::advection);
      const auto ct = adv_->contravariant(st.hist[j][0], st.hist[j][1], st.hist[j][2]);
      st.adv[j] = advection_term(ct, st.hist[j]);
    }
  const auto& B = space_->mesh().mass;
  Vec3Field w;
  for (int p = 0; p < 3; ++p) {
    w[p].assign(n, 0.0);
    for (int j = 1; j <= k; ++j) {
      const auto& u = st.hist[j - 1][p];
      const auto& a = st.adv[j - 1][p];
      for (size_t i = 0; i < n; ++i) w[p][i] -= c.beta[j] * B[i] * u[i] + cfg_.dt * c.alpha[j - 1] * a[i];
    }
  }
  return w;
}

Vec3Field FlowSolver::advect_characteristics(FlowState& st, const TimeCoeffs& c) {
  const int k = c.order;
  const size_t n = space_->size();
  if (static_cast<int>(st.hist.size()) < k) throw ContractError("advection: missing velocity history");
  const double dt = cfg_.dt;
  std::vector<DealiasOperator::Contravariant> ct(k);
  std::vector<double> times(k);
  {
    TimerScope ts(space_->timers(), TimerCat::advection);
    for (int i = 0; i < k; ++i) {
      ct[i] = adv_->contravariant(st.hist[i][0], st.hist[i][1], st.hist[i][2]);
      times[i] = -(i + 1) * dt;
    }
  }
  const double cfl = compute_cfl(*space_, st.hist[0], dt);
  const auto& B = space_->mesh().mass;
  auto rhs = [&](double tau, const Vec3Field& w) {
    const auto lw = lagrange_weights(times, tau);
    DealiasOperator::Contravariant cc;
    for (int s = 0; s < 3; ++s) {
      cc[s].assign(ct[0][s].size(), 0.0);
      for (int i = 0; i < k; ++i)
        for (size_t q = 0; q < cc[s].size(); ++q) cc[s][q] += lw[i] * ct[i][s][q];
    }
    Vec3Field f = advection_term(cc, w);
    for (int p = 0; p < 3; ++p) {
      weak_to_strong(f[p]);
      for (auto& x : f[p]) x = -x;
      space_->mask(f[p], FieldKind::velocity);
    }
    return f;
  };
  Vec3Field out;
  for (int p = 0; p < 3; ++p) out[p].assign(n, 0.0);
  for (int j = 1; j <= k; ++j) {
    int m = std::max(cfg_.char_substeps, static_cast<int>(std::ceil(j * cfl - 1e-12)));
    m = std::min(std::max(m, 1), cfg_.char_max_substeps);
    if (j * cfl / m > 1.5)
      throw StabilityError("characteristics: substep CFL " + std::to_string(j * cfl / m) + " exceeds 1.5");
    const double h = j * dt / m;
    Vec3Field w = st.hist[j - 1];
    double tau = -j * dt;
    for (int s = 0; s < m; ++s) {
      const Vec3Field k1 = rhs(tau, w);
      Vec3Field tmp;
      for (int p = 0; p < 3; ++p) {
        tmp[p] = w[p];
        for (size_t i = 0; i < n; ++i) tmp[p][i] += 0.5 * h * k1[p][i];
      }
      const Vec3Field k2 = rhs(tau + 0.5 * h, tmp);
      for (int p = 0; p < 3; ++p)
        for (size_t i = 0; i < n; ++i) tmp[p][i] = w[p][i] + 0.5 * h * k2[p][i];
      const Vec3Field k3 = rhs(tau + 0.5 * h, tmp);
      for (int p = 0; p < 3; ++p)
        for (size_t i = 0; i < n; ++i) tmp[p][i] = w[p][i] + h * k3[p][i];
      const Vec3Field k4 = rhs(tau + h, tmp);
      for (int p = 0; p < 3; ++p)
        for (size_t i = 0; i < n; ++i) w[p][i] += h / 6.0 * (k1[p][i] + 2.0 * k2[p][i] + 2.0 * k3[p][i] + k4[p][i]);
      tau += h;
    }
    for (int p = 0; p < 3; ++p)
      for (size_t i = 0; i < n; ++i) out[p][i] -= c.beta[j] * B[i] * w[p][i];
  }
  return out;
}

std::vector<double> FlowSolver::weak_divergence(const Vec3Field& v) {
  std::vector<double> w(space_->size());
  local_weak_div(space_->mesh(), space_->basis(), v[0], v[1], v[2], w);
  space_->assemble<double>(w);
  return w;
}

double FlowSolver::divergence_ratio(const Vec3Field& v) {
  const double num = space_->norm(weak_divergence(v));
  // scale: the same sum with every local contribution taken in absolute value
  const size_t n = space_->size();
  const std::vector<double> zero(n, 0.0);
  std::vector<double> scale(n, 0.0), w(n);
  for (int p = 0; p < 3; ++p) {
    Vec3Field one{zero, zero, zero};
    one[p] = v[p];
    local_weak_div(space_->mesh(), space_->basis(), one[0], one[1], one[2], w);
    for (size_t i = 0; i < n; ++i) scale[i] += std::abs(w[i]);
  }
  space_->assemble<double>(scale);
  const double den = space_->norm(scale);
  return den > 0.0 ? num / den : 0.0;
}

std::vector<double> FlowSolver::pressure_rhs(const Vec3Field& ustar, const Vec3Field& uext, double dt) {
  const size_t n = space_->size();
  Vec3Field om, cc;
  for (int p = 0; p < 3; ++p) {
    om[p].resize(n);
    cc[p].resize(n);
  }
  const Mesh& m = space_->mesh();
  local_curl(m, space_->basis(), uext[0], uext[1], uext[2], om[0], om[1], om[2]);
  for (int p = 0; p < 3; ++p) {
    const auto& im = space_->inv_mult();
    for (size_t i = 0; i < n; ++i) om[p][i] *= im[i];
    space_->assemble<double>(om[p]);
  }
  local_curl(m, space_->basis(), om[0], om[1], om[2], cc[0], cc[1], cc[2]);
  std::vector<double> d1(n), d2(n);
  local_weak_div(m, space_->basis(), ustar[0], ustar[1], ustar[2], d1);
  local_weak_div(m, space_->basis(), cc[0], cc[1], cc[2], d2);
  std::vector<double> b(n);
  for (size_t i = 0; i < n; ++i) b[i] = d1[i] / dt - d2[i] / cfg_.Re;
  space_->assemble<double>(b);
  space_->mask(b, FieldKind::pressure);
  return b;
}

SolveResult FlowSolver::solve_pressure(std::span<const double> b, std::span<double> p) {
  const size_t n = space_->size();
  const bool neumann = space_->pure_neumann(FieldKind::pressure);
  std::vector<double> bb(b.begin(), b.end());
  if (neumann) space_->project_mean(bb);
  auto A = [this](std::span<const double> u, std::span<double> w) {
    TimerScope ts(space_->timers(), TimerCat::pressure_ax);
    space_->apply_helmholtz(1.0, 0.0, u, w, FieldKind::pressure);
  };
  auto M = [this](std::span<const double> r, std::span<double> z) { mg_->apply(r, z); };
  const double bnorm = space_->norm(bb);
  std::vector<double> x0(n), bd(n), dx(n);
  proj_.project(*space_, bb, x0, bd);
  const KrylovOps ops = space_ops(*space_, A, M, neumann);
  SolveResult res = pcg(ops, bd, dx, cfg_.pressure_tol, cfg_.pressure_max_iter, true, bnorm);
  for (size_t i = 0; i < n; ++i) p[i] = x0[i] + dx[i];
  if (neumann) space_->project_mean(p);
  if (!res.converged) return res;
  if (bnorm > 0.0) proj_.update(*space_, p, A);
  return res;
}

int FlowSolver::viscous_solve(const Vec3Field& u_corr, const Vec3Field& guess, double beta0, Vec3Field& out) {
  TimerScope ts(space_->timers(), TimerCat::viscous);
  const size_t n = space_->size();
  const double h1 = 1.0 / cfg_.Re, h2 = beta0 / cfg_.dt;
  if (h2 != diag_h2_) {
    const auto d = space_->diagonal(h1, h2, FieldKind::velocity);
    vel_diag_.resize(n);
    for (size_t i = 0; i < n; ++i) vel_diag_[i] = 1.0 / d[i];
    diag_h2_ = h2;
  }
  auto A = [&](std::span<const double> u, std::span<double> w) {
    space_->apply_helmholtz(h1, h2, u, w, FieldKind::velocity);
  };
  auto M = [&](std::span<const double> r, std::span<double> z) {
    for (size_t i = 0; i < n; ++i) z[i] = r[i] * vel_diag_[i];
  };
  const KrylovOps ops = space_ops(*space_, A, M, false);
  const auto& B = space_->mesh().mass;
  int iters = 0;
  for (int p = 0; p < 3; ++p) {
    std::vector<double> rhs(n), x0(guess[p]), ax(n), r(n), dx(n);
    for (size_t i = 0; i < n; ++i) rhs[i] = B[i] * u_corr[p][i] / cfg_.dt;
    space_->assemble<double>(rhs);
    space_->mask(rhs, FieldKind::velocity);
    space_->mask(x0, FieldKind::velocity);
    A(x0, ax);
    for (size_t i = 0; i < n; ++i) r[i] = rhs[i] - ax[i];
    const SolveResult res = pcg(ops, r, dx, cfg_.velocity_tol, cfg_.velocity_max_iter, false, space_->norm(rhs));
    if (!res.converged)
      throw NonConvergenceError("velocity solve (component " + std::to_string(p) + ") did not converge in " +
                                std::to_string(res.iterations) + " iterations, residual " +
                                sci(res.residual));
    out[p].resize(n);
    for (size_t i = 0; i < n; ++i) out[p][i] = x0[i] + dx[i];
    iters = std::max(iters, res.iterations);
  }
  return iters;
}

StepStats FlowSolver::step(FlowState& st) {
  if (st.hist.empty()) throw ContractError("step: state has no velocity");
  const size_t n = space_->size();
  const int k = std::min<int>(cfg_.order, static_cast<int>(st.hist.size()));
  const TimeCoeffs c = bdf_ext_coeffs(k);
  const double dt = cfg_.dt;
  StepStats stats;
  stats.cfl = compute_cfl(*space_, st.hist[0], dt);

  FlowState work = st;
  Vec3Field ustar = cfg_.scheme == TimeScheme::bdfext ? advect_bdfext(work, c) : advect_characteristics(work, c);
  const auto& B = space_->mesh().mass;
  for (int p = 0; p < 3; ++p) {
    if (cfg_.forcing[p] != 0.0)
      for (size_t i = 0; i < n; ++i) ustar[p][i] += dt * B[i] * cfg_.forcing[p];
    weak_to_strong(ustar[p]);
  }

  Vec3Field uext;
  for (int p = 0; p < 3; ++p) {
    uext[p].assign(n, 0.0);
    for (int j = 1; j <= k; ++j)
      for (size_t i = 0; i < n; ++i) uext[p][i] += c.alpha[j - 1] * work.hist[j - 1][p][i];
  }

  std::vector<double> b = pressure_rhs(ustar, uext, dt);
  std::vector<double> p(n, 0.0);
  const SolveResult pres = solve_pressure(b, p);
  if (!pres.converged)
    throw NonConvergenceError("pressure solve did not converge in " + std::to_string(pres.iterations) +
                              " iterations, residual " + sci(pres.residual) + " (reference " +
                              sci(pres.reference) + ")");
  stats.p_iters = pres.iterations;

  Vec3Field gp, ucorr;
  for (int q = 0; q < 3; ++q) gp[q].resize(n);
  local_grad(space_->mesh(), space_->basis(), p, gp[0], gp[1], gp[2],
             space_->counters() ? &space_->counters()->grad : nullptr);
  for (int q = 0; q < 3; ++q) {
    ucorr[q].resize(n);
    for (size_t i = 0; i < n; ++i) ucorr[q][i] = ustar[q][i] - dt * gp[q][i];
  }
  stats.div_rel = divergence_ratio(ucorr);

  Vec3Field unew;
  stats.v_iters = viscous_solve(ucorr, uext, c.beta[0], unew);
  stats.max_u = max_velocity(*space_, unew);

  work.hist.insert(work.hist.begin(), std::move(unew));
  work.adv.insert(work.adv.begin(), Vec3Field{});
  if (static_cast<int>(work.hist.size()) > cfg_.order) {
    work.hist.resize(cfg_.order);
    work.adv.resize(cfg_.order);
  }
  if (cfg_.scheme != TimeScheme::bdfext) work.adv.clear();
  work.p = std::move(p);
  work.t += dt;
  work.step += 1;
  st = std::move(work);
  return stats;
}

}  // namespace nekmini
