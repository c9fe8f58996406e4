#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "nekmini/basis.hpp"
#include "nekmini/comm.hpp"
#include "nekmini/gather_scatter.hpp"
#include "nekmini/kernels.hpp"
#include "nekmini/mesh.hpp"
#include "nekmini/timers.hpp"

namespace nekmini {

// One rank's share of a discretization: local mesh, basis, assembly handle and
// the reductions that make vector algebra independent of the rank count.
// Fields are stored in local (element) form with shared copies kept equal.
class Space {
 public:
  Space() = default;
  // Collective. `elements` lists the global elements owned by this rank (ascending).
  Space(Comm& comm, const Mesh& global, std::span<const std::int64_t> elements, CounterSet* counters = nullptr,
        Timers* timers = nullptr);

  Comm& comm() const { return *comm_; }
  const Mesh& mesh() const { return mesh_; }
  const SpectralBasis& basis() const { return basis_; }
  GsHandle& gs() { return gs_; }
  int order() const { return mesh_.order; }
  int n1() const { return mesh_.order + 1; }
  size_t size() const { return mesh_.num_points(); }
  std::int64_t num_dofs() const { return mesh_.num_dofs; }
  const std::vector<double>& inv_mult() const { return inv_mult_; }
  const std::vector<float>& inv_mult_f() const { return inv_mult_f_; }
  const std::vector<float>& mask_f(FieldKind k) const { return mask_f_[static_cast<int>(k)]; }
  // True when the field kind has no Dirichlet point anywhere in the domain.
  bool pure_neumann(FieldKind k) const { return neumann_[static_cast<int>(k)]; }
  CounterSet* counters() const { return counters_; }
  Timers* timers() const { return timers_; }
  void set_timers(Timers* t) { timers_ = t; }
  GeomView<double> geom() const;
  GeomView<float> geom_f() const;

  // QQ^T, summing shared copies.
  template <class T>
  void assemble(std::span<T> v);
  template <class T>
  void gs(std::span<T> v, GsOp op);
  void mask(std::span<double> v, FieldKind k) const;

  // Assembled inner product sum_i a_i b_i / mult_i.
  double dot(std::span<const double> a, std::span<const double> b) const;
  double norm(std::span<const double> a) const;
  // Several inner products in one reduction.
  std::vector<double> dots(const std::vector<std::pair<std::span<const double>, std::span<const double>>>& pairs) const;
  // Removes the dof-average from v.
  void project_mean(std::span<double> v) const;

  // w = mask(QQ^T (h1 A_L + h2 B_L) u).
  void apply_helmholtz(double h1, double h2, std::span<const double> u, std::span<double> w, FieldKind k);
  // Assembled, masked diagonal of h1 A + h2 B.
  std::vector<double> diagonal(double h1, double h2, FieldKind k);

 private:
  Comm* comm_ = nullptr;
  Mesh mesh_;
  SpectralBasis basis_;
  GsHandle gs_;
  std::vector<double> inv_mult_;
  std::vector<float> inv_mult_f_;
  std::array<std::vector<float>, 2> mask_f_;
  std::vector<float> D_f_;
  std::array<std::vector<float>, 6> g_f_;
  std::array<bool, 2> neumann_{false, false};
  CounterSet* counters_ = nullptr;
  Timers* timers_ = nullptr;
};

// Element-major keys element_index * n3 + node for partition-invariant assembly.
std::vector<std::int64_t> point_keys(const Mesh& mesh);

}  // namespace nekmini
