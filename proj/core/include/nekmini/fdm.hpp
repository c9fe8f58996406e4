#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "nekmini/basis.hpp"
#include "nekmini/kernels.hpp"
#include "nekmini/mesh.hpp"

namespace nekmini {

// Separable box surrogate of one element extended by one node layer per side,
// m = N+3 points per direction.
struct FdmElement {
  std::array<std::vector<double>, 3> K, M;  // m x m 1D stiffness and mass
  std::array<std::vector<double>, 3> S;     // generalized eigenvectors, S^T M S = I
  std::array<std::vector<double>, 3> lam;
  std::array<double, 3> length{};
};

// 1D extended operators for an element of length h. Nodes are dropped (identity
// row) for a missing neighbor (the halo) or a Dirichlet face (face node and halo).
void fdm_1d_operators(const SpectralBasis& basis, double h, bool lo_neighbor, bool lo_dirichlet,
                      bool hi_neighbor, bool hi_dirichlet, std::vector<double>& K, std::vector<double>& M);

class FdmSolver {
 public:
  FdmSolver() = default;
  FdmSolver(const Mesh& mesh, const SpectralBasis& basis, FieldKind kind);

  int m() const { return m_; }
  std::int64_t num_elements() const { return static_cast<std::int64_t>(elems_.size()); }
  const FdmElement& element(std::int64_t e) const { return elems_[e]; }

  // u = S Lambda^-1 S^T r on every extended element (arrays of E * m^3).
  template <class T>
  void solve(const T* r, T* u, KernelCounters* counters = nullptr) const;

  // Surrogate operator (K x M x M + M x K x M + M x M x K) on one element.
  void apply_surrogate(std::int64_t e, const double* u, double* w) const;

 private:
  int m_ = 0;
  std::vector<FdmElement> elems_;
  std::vector<double> inv_lambda_;                       // E * m^3
  std::vector<double> S_, St_;                           // [e][dir] m*m
  std::vector<float> inv_lambda_f_, S_f_, St_f_;
};

}  // namespace nekmini
