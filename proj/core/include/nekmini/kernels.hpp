#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "nekmini/basis.hpp"
#include "nekmini/mesh.hpp"

namespace nekmini {

// Semantic operation counts (formula based, not hardware counters).
struct KernelCounters {
  std::int64_t flops = 0;
  std::int64_t memory_refs = 0;
};

struct CounterSet {
  KernelCounters grad, stiffness, mass, advection, fdm;
};

// Per-element cost formulas, n1 = N+1.
std::int64_t grad_flops(int n1);       // 6 n1^4 + 15 n1^3
std::int64_t stiffness_flops(int n1);  // 12 n1^4 + 15 n1^3
std::int64_t stiffness_memrefs(int n1);  // 7 n1^3
std::int64_t grad_memrefs(int n1);     // 10 n1^3
std::int64_t fdm_flops(int n1);        // 12 (n1+2)^4

// Geometric factors of a mesh in a working precision.
template <class T>
struct GeomView {
  int n1 = 0;
  std::int64_t num_elements = 0;
  const T* D = nullptr;                  // n1 x n1
  std::array<const T*, 6> g{};          // G11 G12 G13 G22 G23 G33
};

// w^e = A^e u^e for the listed elements (all when `elements` is empty).
template <class T>
void stiffness_kernel(const GeomView<T>& geo, const T* u, T* w, std::span<const std::int64_t> elements = {},
                      KernelCounters* counters = nullptr);

void apply_stiffness_local(const Mesh& mesh, const SpectralBasis& basis, std::span<const double> u,
                           std::span<double> w, KernelCounters* counters = nullptr,
                           std::span<const std::int64_t> elements = {});

// (du/dx, du/dy, du/dz) at the gridpoints, element by element.
void local_grad(const Mesh& mesh, const SpectralBasis& basis, std::span<const double> u, std::span<double> ux,
                std::span<double> uy, std::span<double> uz, KernelCounters* counters = nullptr);

// Weak divergence: w_i = sum_p (d phi_i / dx_p, u_p), unassembled.
void local_weak_div(const Mesh& mesh, const SpectralBasis& basis, std::span<const double> ux,
                    std::span<const double> uy, std::span<const double> uz, std::span<double> w);

// Pointwise curl, element by element.
void local_curl(const Mesh& mesh, const SpectralBasis& basis, std::span<const double> ux,
                std::span<const double> uy, std::span<const double> uz, std::span<double> cx,
                std::span<double> cy, std::span<double> cz);

void apply_mass(const Mesh& mesh, std::span<const double> u, std::span<double> w,
                KernelCounters* counters = nullptr);

// Unassembled diagonal of h1 * A + h2 * B, element by element (closed form).
void local_diagonal(const Mesh& mesh, const SpectralBasis& basis, double h1, double h2, std::span<double> diag);

}  // namespace nekmini
