#include "nekmini/space.hpp"

#include <algorithm>
#include <cmath>

#include "nekmini/error.hpp"

namespace nekmini {

std::vector<std::int64_t> point_keys(const Mesh& mesh) {
  const int npe = mesh.points_per_element();
  std::vector<std::int64_t> keys(mesh.num_points());
  for (std::int64_t e = 0; e < mesh.num_elements; ++e) {
    const std::int64_t g = mesh.element_index.empty() ? e : mesh.element_index[e];
    for (int q = 0; q < npe; ++q) keys[static_cast<size_t>(e) * npe + q] = g * npe + q;
  }
  return keys;
}

Space::Space(Comm& comm, const Mesh& global, std::span<const std::int64_t> elements, CounterSet* counters,
             Timers* timers)
    : comm_(&comm), counters_(counters), timers_(timers) {
  if (!std::is_sorted(elements.begin(), elements.end()))
    throw ContractError("Space: element list must be ascending");
  mesh_ = extract_elements(global, elements);
  basis_ = make_basis(mesh_.order);
  const auto keys = point_keys(mesh_);
  gs_ = gs_setup(comm, mesh_.dof_ids, keys, mesh_.points_per_element(), comm.size());
  std::vector<double> ones(mesh_.num_points(), 1.0);
  gs_op<double>(gs_, comm, ones, GsOp::add);
  inv_mult_.resize(ones.size());
  for (size_t i = 0; i < ones.size(); ++i) inv_mult_[i] = 1.0 / ones[i];
  inv_mult_f_.assign(inv_mult_.begin(), inv_mult_.end());
  for (int k = 0; k < 2; ++k) {
    mask_f_[k].assign(mesh_.mask[k].begin(), mesh_.mask[k].end());
    double mn = 1.0;
    for (double v : mesh_.mask[k]) mn = std::min(mn, v);
    neumann_[k] = comm.allreduce_min(mn) > 0.5;
  }
  D_f_.assign(basis_.diff.data.begin(), basis_.diff.data.end());
  for (int c = 0; c < 6; ++c) g_f_[c].assign(mesh_.g[c].begin(), mesh_.g[c].end());
}

GeomView<double> Space::geom() const {
  GeomView<double> g;
  g.n1 = n1();
  g.num_elements = mesh_.num_elements;
  g.D = basis_.diff.data.data();
  for (int c = 0; c < 6; ++c) g.g[c] = mesh_.g[c].data();
  return g;
}

GeomView<float> Space::geom_f() const {
  GeomView<float> g;
  g.n1 = n1();
  g.num_elements = mesh_.num_elements;
  g.D = D_f_.data();
  for (int c = 0; c < 6; ++c) g.g[c] = g_f_[c].data();
  return g;
}

template <class T>
void Space::gs(std::span<T> v, GsOp op) {
  TimerScope ts(timers_, TimerCat::gather_scatter);
  gs_op<T>(gs_, *comm_, v, op);
}

template <class T>
void Space::assemble(std::span<T> v) {
  gs<T>(v, GsOp::add);
}

template void Space::assemble<double>(std::span<double>);
template void Space::assemble<float>(std::span<float>);
template void Space::gs<double>(std::span<double>, GsOp);
template void Space::gs<float>(std::span<float>, GsOp);

void Space::mask(std::span<double> v, FieldKind k) const { apply_mask(v, mesh_, k); }

std::vector<double> Space::dots(
    const std::vector<std::pair<std::span<const double>, std::span<const double>>>& pairs) const {
  const int width = static_cast<int>(pairs.size());
  const int npe = mesh_.points_per_element();
  std::vector<double> rows(static_cast<size_t>(mesh_.num_elements) * width, 0.0);
  for (int c = 0; c < width; ++c) {
    const auto& [a, b] = pairs[c];
    if (a.size() != size() || b.size() != size()) throw ContractError("dot: field length mismatch");
    for (std::int64_t e = 0; e < mesh_.num_elements; ++e) {
      double s = 0.0;
      const size_t off = static_cast<size_t>(e) * npe;
      for (int q = 0; q < npe; ++q) s += a[off + q] * b[off + q] * inv_mult_[off + q];
      rows[static_cast<size_t>(e) * width + c] = s;
    }
  }
  return comm_->ordered_sum(mesh_.element_index, rows, width);
}

double Space::dot(std::span<const double> a, std::span<const double> b) const { return dots({{a, b}})[0]; }

double Space::norm(std::span<const double> a) const { return std::sqrt(std::max(0.0, dot(a, a))); }

void Space::project_mean(std::span<double> v) const {
  std::vector<double> ones(size(), 1.0);
  const double mean = dot(v, ones) / static_cast<double>(mesh_.num_dofs);
  for (auto& x : v) x -= mean;
}

void Space::apply_helmholtz(double h1, double h2, std::span<const double> u, std::span<double> w, FieldKind k) {
  if (u.size() != size() || w.size() != size()) throw ContractError("apply_helmholtz: field length mismatch");
  if (h1 != 0.0) {
    stiffness_kernel<double>(geom(), u.data(), w.data(), {}, counters_ ? &counters_->stiffness : nullptr);
    if (h1 != 1.0)
      for (auto& x : w) x *= h1;
  } else {
    std::fill(w.begin(), w.end(), 0.0);
  }
  if (h2 != 0.0) {
    for (size_t i = 0; i < w.size(); ++i) w[i] += h2 * mesh_.mass[i] * u[i];
    if (counters_) {
      counters_->mass.flops += 2 * static_cast<std::int64_t>(w.size());
      counters_->mass.memory_refs += 3 * static_cast<std::int64_t>(w.size());
    }
  }
  assemble<double>(w);
  mask(w, k);
}

std::vector<double> Space::diagonal(double h1, double h2, FieldKind k) {
  std::vector<double> d(size());
  local_diagonal(mesh_, basis_, h1, h2, d);
  assemble<double>(d);
  const auto mk = mesh_.mask_of(k);
  for (size_t i = 0; i < d.size(); ++i)
    if (mk[i] == 0.0) d[i] = 1.0;
  return d;
}

}  // namespace nekmini
