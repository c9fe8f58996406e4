#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "nekmini/advection.hpp"
#include "nekmini/fdm.hpp"
#include "nekmini/kernels.hpp"
#include "nekmini/mesh.hpp"
#include "nekmini/space.hpp"

using namespace nekmini;

namespace {

Mesh box(int order) {
  BoxSpec s;
  s.counts = {4, 4, 4};
  s.order = order;
  s.deformation = [](const Point3& p) {
    return Point3{p[0] + 0.05 * std::sin(3.0 * p[1]), p[1] + 0.05 * std::sin(3.0 * p[2]), p[2]};
  };
  return build_box_mesh(s);
}

std::vector<double> field(const Mesh& m) {
  std::vector<double> u(m.num_points());
  for (size_t q = 0; q < u.size(); ++q) u[q] = std::sin(m.x[q]) * std::cos(2.0 * m.y[q]) + m.z[q];
  return u;
}

void set_flops(benchmark::State& state, std::int64_t per_call) {
  state.counters["flops"] =
      benchmark::Counter(static_cast<double>(per_call), benchmark::Counter::kIsIterationInvariantRate);
}

void BM_Stiffness(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const Mesh m = box(N);
  const SpectralBasis b = make_basis(N);
  const auto u = field(m);
  std::vector<double> w(u.size());
  for (auto _ : state) {
    apply_stiffness_local(m, b, u, w);
    benchmark::DoNotOptimize(w.data());
  }
  set_flops(state, m.num_elements * stiffness_flops(N + 1));
}
BENCHMARK(BM_Stiffness)->DenseRange(3, 11, 2);

void BM_StiffnessFloat(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const Mesh m = box(N);
  std::vector<std::int64_t> all(m.num_elements);
  for (std::int64_t e = 0; e < m.num_elements; ++e) all[e] = e;
  run_ranks(1, {}, [&](Comm& comm) {
    Space sp(comm, m, all);
    const GeomView<float> geo = sp.geom_f();
    const auto ud = field(sp.mesh());
    std::vector<float> u(ud.begin(), ud.end()), w(u.size());
    for (auto _ : state) {
      stiffness_kernel<float>(geo, u.data(), w.data());
      benchmark::DoNotOptimize(w.data());
    }
  });
  set_flops(state, m.num_elements * stiffness_flops(N + 1));
}
BENCHMARK(BM_StiffnessFloat)->DenseRange(3, 11, 2);

void BM_Gradient(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const Mesh m = box(N);
  const SpectralBasis b = make_basis(N);
  const auto u = field(m);
  std::vector<double> gx(u.size()), gy(u.size()), gz(u.size());
  for (auto _ : state) {
    local_grad(m, b, u, gx, gy, gz);
    benchmark::DoNotOptimize(gz.data());
  }
  set_flops(state, m.num_elements * grad_flops(N + 1));
}
BENCHMARK(BM_Gradient)->DenseRange(3, 11, 2);

void BM_Advection(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const auto variant = static_cast<AdvectionVariant>(state.range(1));
  const Mesh m = box(N);
  const SpectralBasis b = make_basis(N);
  const DealiasOperator op(m, b, default_nq(N));
  const auto u = field(m);
  const auto c = op.contravariant(u, u, u);
  std::vector<double> w(u.size());
  for (auto _ : state) {
    op.apply(c, u, w, variant);
    benchmark::DoNotOptimize(w.data());
  }
  state.SetLabel(to_string(variant));
  set_flops(state, m.num_elements * op.flops_per_element());
}
BENCHMARK(BM_Advection)
    ->ArgsProduct({{3, 5, 7}, {static_cast<int>(AdvectionVariant::blocked2d), static_cast<int>(AdvectionVariant::full3d)}});

void BM_FdmSolve(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const Mesh m = box(N);
  const FdmSolver fdm(m, make_basis(N), FieldKind::pressure);
  const size_t m3 = static_cast<size_t>(fdm.m()) * fdm.m() * fdm.m();
  std::vector<double> r(m3 * m.num_elements), u(r.size());
  for (size_t i = 0; i < r.size(); ++i) r[i] = std::sin(0.1 * static_cast<double>(i));
  for (auto _ : state) {
    fdm.solve<double>(r.data(), u.data());
    benchmark::DoNotOptimize(u.data());
  }
  set_flops(state, m.num_elements * fdm_flops(N + 1));
}
BENCHMARK(BM_FdmSolve)->DenseRange(3, 9, 2);

}  // namespace
