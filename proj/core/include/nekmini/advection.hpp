#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nekmini/basis.hpp"
#include "nekmini/kernels.hpp"
#include "nekmini/mesh.hpp"

namespace nekmini {

enum class AdvectionVariant { blocked2d, full3d, automatic };

const char* to_string(AdvectionVariant v);
AdvectionVariant parse_advection_variant(const std::string& s);

// Default dealiasing grid: ceil(3(N+1)/2) points per direction.
int default_nq(int order);

// Interpolation to an Nq-point GLL grid plus the mass-weighted inverse metrics
// B rx_qp evaluated there from the interpolated coordinates.
class DealiasOperator {
 public:
  DealiasOperator(const Mesh& mesh, const SpectralBasis& basis, int nq);

  int n1() const { return n1_; }
  int nq() const { return nq_; }
  std::int64_t num_elements() const { return ne_; }

  // Contravariant advecting field c~_q = sum_p B rx_qp c_p on the fine grid.
  using Contravariant = std::array<std::vector<double>, 3>;
  Contravariant contravariant(std::span<const double> cx, std::span<const double> cy,
                              std::span<const double> cz) const;
  // a * x + b * y, componentwise.
  static void axpby(Contravariant& out, double a, const Contravariant& x, double b, const Contravariant& y);

  // out = weak dealiased (v, c . grad u), unassembled.
  void apply(const Contravariant& c, std::span<const double> u, std::span<double> out, AdvectionVariant variant,
             KernelCounters* counters = nullptr) const;

  std::int64_t flops_per_element() const;

 private:
  void apply_full3d(const Contravariant& c, const double* u, double* out) const;
  void apply_blocked2d(const Contravariant& c, const double* u, double* out) const;

  int n1_, nq_;
  std::int64_t ne_;
  std::vector<double> J_, JD_, Jt_;       // nq x n1, nq x n1, n1 x nq
  std::array<std::vector<double>, 9> brx_;  // [3q+p] on the fine grid
};

// Picks the candidate with the lowest median wall time over `reps` runs; ties go
// to the earlier candidate.
int select_fastest(const std::vector<std::function<void()>>& candidates, int reps);

// Variant choice for the dealiased advection kernel. full3d is only eligible
// when nq <= 10.
AdvectionVariant select_advection_variant(const DealiasOperator& op, int reps = 5);

}  // namespace nekmini
