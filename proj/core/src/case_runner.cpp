#include "nekmini/case_runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numbers>

#include "nekmini/advection.hpp"
#include "nekmini/checkpoint.hpp"
#include "nekmini/error.hpp"
#include "nekmini/multigrid.hpp"
#include "nekmini/navier_stokes.hpp"
#include "nekmini/partition.hpp"

namespace nekmini {

namespace {

constexpr int kTagGatherField = 6101;
constexpr int kTagVariant = 6102;

// Gathers per-rank element blocks into global element order on rank 0.
std::vector<double> gather_global(Comm& comm, const Mesh& local, std::int64_t global_elements,
                                  std::span<const double> field) {
  const int npe = local.points_per_element();
  std::vector<double> packed;
  packed.reserve(local.num_elements * (npe + 1));
  for (std::int64_t e = 0; e < local.num_elements; ++e) {
    packed.push_back(static_cast<double>(local.element_index[e]));
    packed.insert(packed.end(), field.begin() + e * npe, field.begin() + (e + 1) * npe);
  }
  auto all = comm.gather<double>(packed, kTagGatherField);
  std::vector<double> out;
  if (comm.rank() != 0) return out;
  out.assign(static_cast<size_t>(global_elements) * npe, 0.0);
  for (auto& blk : all)
    for (size_t o = 0; o < blk.size(); o += npe + 1) {
      const auto g = static_cast<std::int64_t>(blk[o]);
      std::copy_n(blk.begin() + o + 1, npe, out.begin() + g * npe);
    }
  return out;
}

SmootherConfig smoother_config(const CaseConfig& cfg) {
  SmootherConfig s;
  s.kind = parse_smoother(cfg.smoother);
  s.cheby_degree = cfg.cheby_degree;
  s.single_precision = cfg.precision == 32;
  return s;
}

std::pair<std::int64_t, std::int64_t> report_window(const CaseConfig& cfg, std::int64_t steps) {
  if (cfg.report_window != "auto") {
    const auto dash = cfg.report_window.find('-');
    return {std::stoll(cfg.report_window.substr(0, dash)), std::stoll(cfg.report_window.substr(dash + 1))};
  }
  if (steps >= 200) return {101, 200};
  return {steps / 2 + 1, steps};
}

}  // namespace

RunReport run_case(const CaseConfig& cfg, const RunOptions& opt) {
  RunReport rep;
  rep.config = cfg.echo();
  const int P = opt.ranks > 0 ? opt.ranks : cfg.ranks;
  const bool flow = cfg.case_type == "flow";
  if (flow && cfg.scheme == "char" && cfg.time_order > 2)
    throw ConfigError(0, "time.scheme = char supports time.order <= 2");

  const Mesh global = build_box_mesh(box_spec(cfg));
  if (global.num_elements < P) throw ConfigError(0, "more ranks than elements");
  const auto sched = pmg_schedule(cfg.order);
  std::vector<Mesh> lower;
  lower.reserve(sched.size());
  for (size_t l = 1; l < sched.size(); ++l) lower.push_back(remesh_order(global, sched[l]));
  std::vector<const Mesh*> levels{&global};
  for (const auto& m : lower) levels.push_back(&m);

  const ElementGraph graph = build_element_graph(global);
  Partition part;
  if (P == 1) {
    part.parts = 1;
    part.rank_of_element.assign(global.num_elements, 0);
  } else if (cfg.partition == "rcb") {
    part = rcb(graph.centroids, P);
  } else {
    part = rsb(graph, P);
  }
  const PartitionQuality q = partition_quality(graph, part);
  rep.ngh = q.neighbors;
  rep.edge_cut = q.edge_cut;
  rep.min_part = q.min_size;
  rep.max_part = q.max_size;
  std::vector<std::vector<std::int64_t>> owned(P);
  for (std::int64_t e = 0; e < global.num_elements; ++e) owned[part.rank_of_element[e]].push_back(e);

  const FieldKind kind = flow ? FieldKind::pressure : FieldKind::velocity;
  const SmootherConfig scfg = smoother_config(cfg);
  const auto [w_first, w_last] = report_window(cfg, cfg.steps);
  rep.window_first = w_first;
  rep.window_last = w_last;
  std::mutex mu;

  CostModel cost;
  cost.latency_us = cfg.gs_latency_us;
  cost.bandwidth_bytes_per_us = cfg.gs_bandwidth;

  run_ranks(P, cost, [&](Comm& comm) {
    const bool root = comm.rank() == 0;
    Timers timers;
    CounterSet counters;
    const auto& mine = owned[comm.rank()];
    Space sp(comm, global, mine, &counters, &timers);
    GsStrategy strat;
    if (cfg.gs_strategy == "auto")
      strat = gs_autotune(sp.gs(), comm, cfg.gs_trials);
    else
      strat = parse_strategy(cfg.gs_strategy);
    sp.gs().set_strategy(strat);
    Multigrid mg(sp, levels, mine, scfg, kind);
    for (int l = 1; l < mg.num_levels(); ++l) mg.level(l).gs().set_strategy(strat);
    if (root) rep.gs_strategy = to_string(strat);

    auto finish_counters = [&] {
      const auto g = comm.allreduce_sum(counters.grad.flops);
      const auto s = comm.allreduce_sum(counters.stiffness.flops);
      if (root) {
        rep.grad_flops = g;
        rep.stiffness_flops = s;
      }
    };

    if (!flow) {
      const size_t n = sp.size();
      const Mesh& m = sp.mesh();
      const double pi = std::numbers::pi;
      std::vector<double> b(n), exact(n), x(n);
      for (size_t i = 0; i < n; ++i) {
        exact[i] = std::sin(pi * m.x[i]) * std::sin(pi * m.y[i]) * std::sin(pi * m.z[i]);
        b[i] = 3.0 * pi * pi * exact[i] * m.mass[i];
      }
      sp.assemble<double>(b);
      sp.mask(b, kind);
      auto A = [&](std::span<const double> u, std::span<double> w) { sp.apply_helmholtz(1.0, 0.0, u, w, kind); };
      auto M = [&](std::span<const double> r, std::span<double> z) { mg.apply(r, z); };
      const KrylovOps ops = space_ops(sp, A, M, sp.pure_neumann(kind));
      timers.reset();
      const SolveResult res = pcg(ops, b, x, cfg.pressure_tol, cfg.pressure_max_iter, true);
      double err = 0.0;
      for (size_t i = 0; i < n; ++i) err = std::max(err, std::abs(x[i] - exact[i]));
      err = comm.allreduce_max(err);
      finish_counters();
      if (root) {
        rep.poisson_iters = res.iterations;
        rep.poisson_error = err;
        rep.timing = timers.totals();
        if (!res.converged) {
          rep.exit_code = 2;
          rep.failure = "Poisson solve did not converge";
        }
        rep.u[0] = gather_global(comm, sp.mesh(), global.num_elements, x);
      } else {
        gather_global(comm, sp.mesh(), global.num_elements, x);
      }
      return;
    }

    const int nq = cfg.nq > 0 ? cfg.nq : default_nq(cfg.order);
    DealiasOperator op(sp.mesh(), sp.basis(), nq);
    AdvectionVariant variant = parse_advection_variant(cfg.advection_variant);
    if (variant == AdvectionVariant::automatic) {
      std::vector<int> v(1, 0);
      if (root) v[0] = static_cast<int>(select_advection_variant(op));
      v = comm.bcast(std::move(v), kTagVariant);
      variant = static_cast<AdvectionVariant>(v[0]);
    }
    if (root) rep.advection_variant = to_string(variant);

    FlowConfig fc;
    fc.dt = cfg.dt;
    fc.Re = cfg.Re;
    fc.order = cfg.time_order;
    fc.scheme = cfg.scheme == "char" ? TimeScheme::characteristics : TimeScheme::bdfext;
    fc.char_substeps = cfg.char_substeps;
    fc.pressure_tol = cfg.pressure_tol;
    fc.pressure_max_iter = cfg.pressure_max_iter;
    fc.velocity_tol = cfg.velocity_tol;
    fc.velocity_max_iter = cfg.velocity_max_iter;
    fc.variant = variant;
    fc.forcing = cfg.forcing;
    FlowSolver solver(sp, mg, op, fc, cfg.projection_capacity);

    const Mesh& m = sp.mesh();
    const size_t n = sp.size();
    FlowState st;
    const bool tg = cfg.ic == "taylor_green";
    auto tg_field = [&](double t) {
      Vec3Field u;
      for (auto& c : u) c.resize(n);
      for (size_t i = 0; i < n; ++i) {
        const auto v = taylor_green(m.x[i], m.y[i], t, cfg.Re);
        for (int c = 0; c < 3; ++c) u[c][i] = v[c];
      }
      return u;
    };
    st.p.assign(n, 0.0);
    if (tg) {
      for (int j = 0; j < cfg.time_order; ++j) st.hist.push_back(tg_field(-j * cfg.dt));
    } else if (cfg.ic.rfind("file:", 0) == 0) {
      const Checkpoint ck = read_checkpoint_file(cfg.ic.substr(5));
      check_checkpoint_shape(ck, global.num_elements, cfg.order, 4);
      const int npe = m.points_per_element();
      Vec3Field u;
      for (int c = 0; c < 3; ++c) {
        u[c].resize(n);
        for (std::int64_t e = 0; e < m.num_elements; ++e)
          std::copy_n(ck.fields[c].begin() + m.element_index[e] * npe, npe, u[c].begin() + e * npe);
      }
      for (std::int64_t e = 0; e < m.num_elements; ++e)
        std::copy_n(ck.fields[3].begin() + m.element_index[e] * npe, npe, st.p.begin() + e * npe);
      st.hist.push_back(std::move(u));
      st.t = ck.time;
      st.step = ck.step;
    } else {
      Vec3Field u;
      for (auto& c : u) c.assign(n, 0.0);
      st.hist.push_back(std::move(u));
    }
    const double u0 = max_velocity(sp, st.u());

    timers.reset();
    try {
      for (std::int64_t s = 0; s < cfg.steps; ++s) {
        const auto t0 = std::chrono::steady_clock::now();
        const StepStats stats = solver.step(st);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        double err = 0.0;
        if (tg) {
          const Vec3Field ex = tg_field(st.t);
          for (int c = 0; c < 3; ++c)
            for (size_t i = 0; i < n; ++i) err = std::max(err, std::abs(st.u()[c][i] - ex[c][i]));
          err = comm.allreduce_max(err);
        }
        if (root) {
          StepRecord r{st.step, st.t, cfg.dt, stats.cfl, stats.v_iters, stats.p_iters,
                       stats.div_rel, stats.max_u, err, wall};
          rep.steps.push_back(r);
          if (opt.on_step) opt.on_step(r);
        }
        if (!std::isfinite(stats.max_u)) throw StabilityError("velocity is no longer finite");
        if (opt.growth_limit > 0.0 && stats.max_u > opt.growth_limit * u0) {
          if (root) rep.stopped_on_growth = true;
          break;
        }
      }
    } catch (const NonConvergenceError& e) {
      if (root) {
        rep.exit_code = 2;
        rep.failure = std::string("step ") + std::to_string(st.step + 1) + ": " + e.what();
      }
    } catch (const BreakdownError& e) {
      if (root) {
        rep.exit_code = 2;
        rep.failure = std::string("step ") + std::to_string(st.step + 1) + ": " + e.what();
      }
    } catch (const StabilityError& e) {
      if (root) {
        rep.exit_code = 2;
        rep.failure = std::string("step ") + std::to_string(st.step + 1) + ": " + e.what();
      }
    }
    finish_counters();
    std::array<std::vector<double>, 3> gu;
    for (int c = 0; c < 3; ++c) gu[c] = gather_global(comm, m, global.num_elements, st.u()[c]);
    auto gp = gather_global(comm, m, global.num_elements, st.p);
    if (root) {
      std::lock_guard<std::mutex> lk(mu);
      rep.timing = timers.totals();
      rep.u = std::move(gu);
      rep.p = std::move(gp);
      rep.final_time = st.t;
      rep.final_step = st.step;
    }
  });

  double sum = 0.0;
  int cnt = 0;
  for (const auto& s : rep.steps)
    if (s.step >= rep.window_first && s.step <= rep.window_last) {
      sum += s.t_step;
      ++cnt;
    }
  rep.t_step_avg = cnt ? sum / cnt : 0.0;

  if (!opt.report_path.empty()) {
    std::ofstream f(opt.report_path);
    if (!f) throw ConfigError(0, "cannot write report '" + opt.report_path + "'");
    write_report_csv(f, rep);
  }
  if (!opt.checkpoint_path.empty() && flow) {
    Checkpoint ck;
    ck.num_elements = global.num_elements;
    ck.order = cfg.order;
    ck.time = rep.final_time;
    ck.step = rep.final_step;
    ck.fields = {rep.u[0], rep.u[1], rep.u[2], rep.p};
    write_checkpoint_file(opt.checkpoint_path, ck);
  }
  return rep;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  if (n < 2 || y.size() != n) return 0.0;
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

StudyResult convergence_study(const CaseConfig& base, const std::string& axis, const std::vector<double>& values) {
  if (axis != "N" && axis != "dt") throw ConfigError(0, "study axis must be N or dt");
  StudyResult out;
  out.axis = axis;
  std::vector<double> xs, ys;
  const double T = base.dt * static_cast<double>(base.steps);
  for (double v : values) {
    CaseConfig c = base;
    if (axis == "N") {
      c.order = static_cast<int>(v);
    } else {
      c.dt = v;
      c.steps = static_cast<std::int64_t>(std::llround(T / v));
    }
    const RunReport r = run_case(c);
    if (r.exit_code != 0) throw NonConvergenceError("study run failed at " + axis + " = " + std::to_string(v) + ": " +
                                                    r.failure);
    const double err = c.case_type == "poisson" ? r.poisson_error : (r.steps.empty() ? 0.0 : r.steps.back().err);
    out.values.push_back(v);
    out.errors.push_back(err);
    if (err > 0.0) {
      xs.push_back(axis == "N" ? v : std::log(v));
      ys.push_back(std::log(err));
    }
  }
  out.slope = fit_slope(xs, ys);
  return out;
}

}  // namespace nekmini
