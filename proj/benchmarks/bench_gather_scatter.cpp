#include <benchmark/benchmark.h>

#include <chrono>
#include <vector>

#include "nekmini/comm.hpp"
#include "nekmini/gather_scatter.hpp"
#include "nekmini/mesh.hpp"
#include "nekmini/partition.hpp"
#include "nekmini/space.hpp"

using namespace nekmini;

namespace {

// Wall time per exchange on a partitioned 4x4x4 box, setup excluded.
void BM_GatherScatter(benchmark::State& state) {
  const int P = static_cast<int>(state.range(0));
  const auto strategy = static_cast<GsStrategy>(state.range(1));
  BoxSpec s;
  s.counts = {4, 4, 4};
  s.order = 5;
  const Mesh mesh = build_box_mesh(s);
  const Partition part = rsb(build_element_graph(mesh), P);
  std::vector<std::vector<std::int64_t>> owned(P);
  for (std::int64_t e = 0; e < mesh.num_elements; ++e) owned[part.rank_of_element[e]].push_back(e);
  constexpr int reps = 20;
  for (auto _ : state) {
    double secs = 0.0;
    run_ranks(P, {}, [&](Comm& comm) {
      Space sp(comm, mesh, owned[comm.rank()]);
      sp.gs().set_strategy(strategy);
      std::vector<double> v(sp.size(), 1.0);
      comm.barrier();
      const auto t0 = std::chrono::steady_clock::now();
      for (int k = 0; k < reps; ++k) sp.assemble<double>(v);
      comm.barrier();
      if (comm.rank() == 0) secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      benchmark::DoNotOptimize(v.data());
    });
    state.SetIterationTime(secs / reps);
  }
  state.SetLabel(to_string(strategy));
}
BENCHMARK(BM_GatherScatter)
    ->ArgsProduct({{2, 4, 8},
                   {static_cast<int>(GsStrategy::pairwise), static_cast<int>(GsStrategy::crystal_router),
                    static_cast<int>(GsStrategy::all_reduce)}})
    ->UseManualTime()
    ->Unit(benchmark::kMicrosecond);

}  // namespace
