#include "nekmini/multigrid.hpp"

#include <algorithm>

#include "nekmini/error.hpp"
#include "nekmini/tensor.hpp"

namespace nekmini {

std::vector<int> pmg_schedule(int order) {
  std::vector<int> s{order};
  for (int o : {std::max(order / 2, 1), 1})
    if (o < s.back()) s.push_back(o);
  return s;
}

Multigrid::Multigrid(Space& top, const std::vector<const Mesh*>& global_levels,
                     std::span<const std::int64_t> elements, const SmootherConfig& smoother, FieldKind kind)
    : kind_(kind) {
  const auto sched = pmg_schedule(top.order());
  if (global_levels.size() != sched.size()) throw ContractError("multigrid: level meshes do not match the schedule");
  levels_.push_back(&top);
  for (size_t l = 1; l < sched.size(); ++l) {
    if (global_levels[l]->order != sched[l]) throw ContractError("multigrid: level mesh has the wrong order");
    owned_.push_back(std::make_unique<Space>(top.comm(), *global_levels[l], elements, top.counters(), top.timers()));
    levels_.push_back(owned_.back().get());
  }
  for (size_t l = 0; l + 1 < levels_.size(); ++l) {
    smoothers_.push_back(std::make_unique<Smoother>(*levels_[l], *global_levels[l], elements, smoother, kind));
    const Matrix J = interp_matrix(levels_[l + 1]->basis(), levels_[l]->basis().nodes).values;
    J_.push_back(J.data);
    Jt_.push_back(J.transpose().data);
  }
  coarse_ = std::make_unique<CoarseSolver>(*levels_.back(), kind);
}

void Multigrid::restrict_to(int l, std::span<const double> fine, std::span<double> coarse) {
  Space& f = *levels_[l];
  Space& c = *levels_[l + 1];
  const int nf = f.n1(), nc = c.n1();
  const int npf = nf * nf * nf, npc = nc * nc * nc;
  std::vector<double> tmp(npf), work(2 * static_cast<size_t>(npf));
  const auto& im = f.inv_mult();
  for (std::int64_t e = 0; e < f.mesh().num_elements; ++e) {
    for (int q = 0; q < npf; ++q) tmp[q] = fine[e * npf + q] * im[e * npf + q];
    const double* M = Jt_[l].data();
    tensor::apply3(nc, nf, M, M, M, tmp.data(), coarse.data() + e * npc, work.data());
  }
  c.assemble<double>(coarse);
  c.mask(coarse, kind_);
}

void Multigrid::prolong_add(int l, std::span<const double> coarse, std::span<double> fine) {
  Space& f = *levels_[l];
  Space& c = *levels_[l + 1];
  const int nf = f.n1(), nc = c.n1();
  const int npf = nf * nf * nf, npc = nc * nc * nc;
  std::vector<double> tmp(npf), work(2 * static_cast<size_t>(npf));
  for (std::int64_t e = 0; e < f.mesh().num_elements; ++e) {
    const double* M = J_[l].data();
    tensor::apply3(nf, nc, M, M, M, coarse.data() + e * npc, tmp.data(), work.data());
    for (int q = 0; q < npf; ++q) fine[e * npf + q] += tmp[q];
  }
  f.mask(fine, kind_);
}

void Multigrid::cycle(int l, std::span<const double> r, std::span<double> z) {
  Space& sp = *levels_[l];
  if (l + 1 == num_levels()) {
    TimerScope ts(sp.timers(), TimerCat::pressure_coarse);
    coarse_->solve(r, z);
    return;
  }
  const size_t n = sp.size();
  Smoother& S = *smoothers_[l];
  S.apply(r, z);
  std::vector<double> res(n), w(n);
  S.apply_A<double>(z.data(), w.data());
  for (size_t i = 0; i < n; ++i) res[i] = r[i] - w[i];
  Space& cs = *levels_[l + 1];
  std::vector<double> rc(cs.size()), ec(cs.size());
  restrict_to(l, res, rc);
  cycle(l + 1, rc, ec);
  prolong_add(l, ec, z);
  S.apply_A<double>(z.data(), w.data());
  for (size_t i = 0; i < n; ++i) res[i] = r[i] - w[i];
  S.apply(res, w);
  for (size_t i = 0; i < n; ++i) z[i] += w[i];
}

void Multigrid::apply(std::span<const double> r, std::span<double> z) {
  if (r.size() != levels_[0]->size() || z.size() != r.size()) throw ContractError("multigrid: field length mismatch");
  TimerScope ts(levels_[0]->timers(), TimerCat::pressure_preco);
  cycle(0, r, z);
}

}  // namespace nekmini
