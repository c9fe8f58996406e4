#include "nekmini/kernels.hpp"

#include "nekmini/error.hpp"
#include "nekmini/tensor.hpp"

namespace nekmini {

std::int64_t grad_flops(int n1) {
  const std::int64_t n = n1;
  return 6 * n * n * n * n + 15 * n * n * n;
}
std::int64_t stiffness_flops(int n1) {
  const std::int64_t n = n1;
  return 12 * n * n * n * n + 15 * n * n * n;
}
std::int64_t stiffness_memrefs(int n1) {
  const std::int64_t n = n1;
  return 7 * n * n * n;
}
std::int64_t grad_memrefs(int n1) {
  const std::int64_t n = n1;
  return 10 * n * n * n;
}
std::int64_t fdm_flops(int n1) {
  const std::int64_t m = n1 + 2;
  return 12 * m * m * m * m;
}

namespace {

template <class T>
void derivs(int n1, const T* D, const T* u, T* ur, T* us, T* ut) {
  tensor::contract_r(n1, n1, D, u, ur, n1 * n1);
  tensor::contract_s(n1, n1, D, u, us, n1, n1);
  tensor::contract_t(n1, n1, D, u, ut, n1 * n1);
}

// w = Dr^T a + Ds^T b + Dt^T c
template <class T>
void derivs_transpose(int n1, const T* Dt, const T* a, const T* b, const T* c, T* w, T* tmp) {
  const int n3 = n1 * n1 * n1;
  tensor::contract_r(n1, n1, Dt, a, w, n1 * n1);
  tensor::contract_s(n1, n1, Dt, b, tmp, n1, n1);
  for (int q = 0; q < n3; ++q) w[q] += tmp[q];
  tensor::contract_t(n1, n1, Dt, c, tmp, n1 * n1);
  for (int q = 0; q < n3; ++q) w[q] += tmp[q];
}

void check_len(const Mesh& m, size_t n, const char* what) {
  if (n != m.num_points()) throw ContractError(std::string(what) + ": field length does not match mesh");
}

void check_order(const Mesh& m, const SpectralBasis& b, const char* what) {
  if (m.order != b.order) throw ContractError(std::string(what) + ": basis order does not match mesh order");
}

}  // namespace

template <class T>
void stiffness_kernel(const GeomView<T>& geo, const T* u, T* w, std::span<const std::int64_t> elements,
                      KernelCounters* counters) {
  const int n1 = geo.n1, n3 = n1 * n1 * n1;
  std::vector<T> Dt(static_cast<size_t>(n1) * n1);
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n1; ++j) Dt[static_cast<size_t>(j) * n1 + i] = geo.D[static_cast<size_t>(i) * n1 + j];
  std::vector<T> work(4 * static_cast<size_t>(n3));
  T* ur = work.data();
  T* us = ur + n3;
  T* ut = us + n3;
  T* tmp = ut + n3;
  const std::int64_t count = elements.empty() ? geo.num_elements : static_cast<std::int64_t>(elements.size());
  for (std::int64_t a = 0; a < count; ++a) {
    const std::int64_t e = elements.empty() ? a : elements[a];
    const size_t off = static_cast<size_t>(e) * n3;
    derivs(n1, geo.D, u + off, ur, us, ut);
    const T* g0 = geo.g[0] + off;
    const T* g1 = geo.g[1] + off;
    const T* g2 = geo.g[2] + off;
    const T* g3 = geo.g[3] + off;
    const T* g4 = geo.g[4] + off;
    const T* g5 = geo.g[5] + off;
    for (int q = 0; q < n3; ++q) {
      const T x = ur[q], y = us[q], z = ut[q];
      ur[q] = g0[q] * x + g1[q] * y + g2[q] * z;
      us[q] = g1[q] * x + g3[q] * y + g4[q] * z;
      ut[q] = g2[q] * x + g4[q] * y + g5[q] * z;
    }
    derivs_transpose(n1, Dt.data(), ur, us, ut, w + off, tmp);
  }
  if (counters) {
    counters->flops += count * stiffness_flops(n1);
    counters->memory_refs += count * stiffness_memrefs(n1);
  }
}

template void stiffness_kernel<double>(const GeomView<double>&, const double*, double*,
                                       std::span<const std::int64_t>, KernelCounters*);
template void stiffness_kernel<float>(const GeomView<float>&, const float*, float*, std::span<const std::int64_t>,
                                      KernelCounters*);

void apply_stiffness_local(const Mesh& mesh, const SpectralBasis& basis, std::span<const double> u,
                           std::span<double> w, KernelCounters* counters, std::span<const std::int64_t> elements) {
  check_order(mesh, basis, "apply_stiffness_local");
  check_len(mesh, u.size(), "apply_stiffness_local");
  check_len(mesh, w.size(), "apply_stiffness_local");
  GeomView<double> geo;
  geo.n1 = mesh.order + 1;
  geo.num_elements = mesh.num_elements;
  geo.D = basis.diff.data.data();
  for (int c = 0; c < 6; ++c) geo.g[c] = mesh.g[c].data();
  stiffness_kernel(geo, u.data(), w.data(), elements, counters);
}

void local_grad(const Mesh& mesh, const SpectralBasis& basis, std::span<const double> u, std::span<double> ux,
                std::span<double> uy, std::span<double> uz, KernelCounters* counters) {
  check_order(mesh, basis, "local_grad");
  check_len(mesh, u.size(), "local_grad");
  check_len(mesh, ux.size(), "local_grad");
  check_len(mesh, uy.size(), "local_grad");
  check_len(mesh, uz.size(), "local_grad");
  const int n1 = mesh.order + 1, n3 = n1 * n1 * n1;
  std::vector<double> work(3 * static_cast<size_t>(n3));
  double* ur = work.data();
  double* us = ur + n3;
  double* ut = us + n3;
  double* out[3] = {ux.data(), uy.data(), uz.data()};
  for (std::int64_t e = 0; e < mesh.num_elements; ++e) {
    const size_t off = static_cast<size_t>(e) * n3;
    derivs(n1, basis.diff.data.data(), u.data() + off, ur, us, ut);
    for (int p = 0; p < 3; ++p) {
      const double* r0 = mesh.metrics[0 + p].data() + off;
      const double* r1 = mesh.metrics[3 + p].data() + off;
      const double* r2 = mesh.metrics[6 + p].data() + off;
      double* o = out[p] + off;
      for (int q = 0; q < n3; ++q) o[q] = r0[q] * ur[q] + r1[q] * us[q] + r2[q] * ut[q];
    }
  }
  if (counters) {
    counters->flops += mesh.num_elements * grad_flops(n1);
    counters->memory_refs += mesh.num_elements * grad_memrefs(n1);
  }
}

void local_weak_div(const Mesh& mesh, const SpectralBasis& basis, std::span<const double> ux,
                    std::span<const double> uy, std::span<const double> uz, std::span<double> w) {
  check_order(mesh, basis, "local_weak_div");
  check_len(mesh, w.size(), "local_weak_div");
  const int n1 = mesh.order + 1, n3 = n1 * n1 * n1;
  std::vector<double> Dt = tensor::transpose(basis.diff.data, n1, n1);
  std::vector<double> work(4 * static_cast<size_t>(n3));
  double* v[3] = {work.data(), work.data() + n3, work.data() + 2 * n3};
  double* tmp = work.data() + 3 * n3;
  const double* in[3] = {ux.data(), uy.data(), uz.data()};
  for (std::int64_t e = 0; e < mesh.num_elements; ++e) {
    const size_t off = static_cast<size_t>(e) * n3;
    const double* B = mesh.mass.data() + off;
    for (int q = 0; q < 3; ++q) {
      const double* m0 = mesh.metrics[3 * q + 0].data() + off;
      const double* m1 = mesh.metrics[3 * q + 1].data() + off;
      const double* m2 = mesh.metrics[3 * q + 2].data() + off;
      for (int i = 0; i < n3; ++i)
        v[q][i] = B[i] * (m0[i] * in[0][off + i] + m1[i] * in[1][off + i] + m2[i] * in[2][off + i]);
    }
    derivs_transpose(n1, Dt.data(), v[0], v[1], v[2], w.data() + off, tmp);
  }
}

void local_curl(const Mesh& mesh, const SpectralBasis& basis, std::span<const double> ux,
                std::span<const double> uy, std::span<const double> uz, std::span<double> cx,
                std::span<double> cy, std::span<double> cz) {
  const size_t n = mesh.num_points();
  std::vector<double> g(9 * n);
  auto part = [&](int c) { return std::span<double>(g.data() + c * n, n); };
  local_grad(mesh, basis, ux, part(0), part(1), part(2));
  local_grad(mesh, basis, uy, part(3), part(4), part(5));
  local_grad(mesh, basis, uz, part(6), part(7), part(8));
  for (size_t i = 0; i < n; ++i) {
    const double duy_dz = g[5 * n + i], duz_dy = g[7 * n + i];
    const double dux_dz = g[2 * n + i], duz_dx = g[6 * n + i];
    const double dux_dy = g[1 * n + i], duy_dx = g[3 * n + i];
    cx[i] = duz_dy - duy_dz;
    cy[i] = dux_dz - duz_dx;
    cz[i] = duy_dx - dux_dy;
  }
}

void apply_mass(const Mesh& mesh, std::span<const double> u, std::span<double> w, KernelCounters* counters) {
  check_len(mesh, u.size(), "apply_mass");
  check_len(mesh, w.size(), "apply_mass");
  for (size_t i = 0; i < u.size(); ++i) w[i] = mesh.mass[i] * u[i];
  if (counters) {
    counters->flops += static_cast<std::int64_t>(u.size());
    counters->memory_refs += 2 * static_cast<std::int64_t>(u.size());
  }
}

void local_diagonal(const Mesh& mesh, const SpectralBasis& basis, double h1, double h2, std::span<double> diag) {
  check_order(mesh, basis, "local_diagonal");
  check_len(mesh, diag.size(), "local_diagonal");
  const int n1 = mesh.order + 1, n3 = n1 * n1 * n1;
  const Matrix& D = basis.diff;
  for (std::int64_t e = 0; e < mesh.num_elements; ++e) {
    const size_t off = static_cast<size_t>(e) * n3;
    auto G = [&](int c, int i, int j, int k) { return mesh.g[c][off + i + n1 * (j + n1 * k)]; };
    for (int k = 0; k < n1; ++k)
      for (int j = 0; j < n1; ++j)
        for (int i = 0; i < n1; ++i) {
          double s = 0.0;
          for (int l = 0; l < n1; ++l) {
            s += D(l, i) * D(l, i) * G(0, l, j, k);
            s += D(l, j) * D(l, j) * G(3, i, l, k);
            s += D(l, k) * D(l, k) * G(5, i, j, l);
          }
          s += 2.0 * D(i, i) * D(j, j) * G(1, i, j, k);
          s += 2.0 * D(i, i) * D(k, k) * G(2, i, j, k);
          s += 2.0 * D(j, j) * D(k, k) * G(4, i, j, k);
          const size_t q = off + i + n1 * (j + n1 * k);
          diag[q] = h1 * s + h2 * mesh.mass[q];
        }
  }
}

}  // namespace nekmini
