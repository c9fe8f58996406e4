#include "nekmini/fdm.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "nekmini/error.hpp"
#include "nekmini/tensor.hpp"

namespace nekmini {

void fdm_1d_operators(const SpectralBasis& basis, double h, bool lo_neighbor, bool lo_dirichlet,
                      bool hi_neighbor, bool hi_dirichlet, std::vector<double>& K, std::vector<double>& M) {
  const int N = basis.order, n1 = N + 1;
  const int total = 3 * N + 1;
  // Three-element chain, all elements of length h.
  Eigen::MatrixXd Kc = Eigen::MatrixXd::Zero(total, total), Mc = Eigen::MatrixXd::Zero(total, total);
  Eigen::MatrixXd Ke(n1, n1);
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n1; ++j) {
      double s = 0.0;
      for (int q = 0; q < n1; ++q) s += basis.diff(q, i) * basis.weights[q] * basis.diff(q, j);
      Ke(i, j) = 2.0 / h * s;
    }
  for (int el = 0; el < 3; ++el) {
    const int o = el * N;
    Kc.block(o, o, n1, n1) += Ke;
    for (int i = 0; i < n1; ++i) Mc(o + i, o + i) += 0.5 * h * basis.weights[i];
  }
  const int m = N + 3, first = N - 1;
  std::vector<bool> drop(m, false);
  if (!lo_neighbor || lo_dirichlet) drop[0] = true;
  if (lo_dirichlet) drop[1] = true;
  if (!hi_neighbor || hi_dirichlet) drop[m - 1] = true;
  if (hi_dirichlet) drop[m - 2] = true;
  K.assign(static_cast<size_t>(m) * m, 0.0);
  M.assign(static_cast<size_t>(m) * m, 0.0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const size_t q = static_cast<size_t>(i) * m + j;
      if (drop[i] || drop[j]) {
        K[q] = M[q] = (i == j) ? 1.0 : 0.0;
      } else {
        K[q] = Kc(first + i, first + j);
        M[q] = Mc(first + i, first + j);
      }
    }
}

namespace {

double axis_length(const Mesh& mesh, std::int64_t e, int dir) {
  const int n1 = mesh.order + 1, npe = mesh.points_per_element();
  const size_t off = static_cast<size_t>(e) * npe;
  auto idx = [&](int i, int j, int k) { return off + i + n1 * (j + static_cast<size_t>(n1) * k); };
  double sum = 0.0;
  for (int b = 0; b < n1; ++b)
    for (int a = 0; a < n1; ++a) {
      size_t lo, hi;
      if (dir == 0) {
        lo = idx(0, a, b);
        hi = idx(n1 - 1, a, b);
      } else if (dir == 1) {
        lo = idx(a, 0, b);
        hi = idx(a, n1 - 1, b);
      } else {
        lo = idx(a, b, 0);
        hi = idx(a, b, n1 - 1);
      }
      const double dx = mesh.x[hi] - mesh.x[lo], dy = mesh.y[hi] - mesh.y[lo], dz = mesh.z[hi] - mesh.z[lo];
      sum += std::sqrt(dx * dx + dy * dy + dz * dz);
    }
  return sum / (n1 * n1);
}

}  // namespace

FdmSolver::FdmSolver(const Mesh& mesh, const SpectralBasis& basis, FieldKind kind) : m_(mesh.order + 3) {
  if (basis.order != mesh.order) throw ContractError("FdmSolver: basis order does not match mesh");
  const int m = m_, m3 = m * m * m;
  const auto& dir_face = mesh.dirichlet_face[static_cast<int>(kind)];
  elems_.resize(mesh.num_elements);
  inv_lambda_.assign(static_cast<size_t>(mesh.num_elements) * m3, 0.0);
  S_.resize(static_cast<size_t>(mesh.num_elements) * 3 * m * m);
  St_.resize(S_.size());
  for (std::int64_t e = 0; e < mesh.num_elements; ++e) {
    FdmElement& fe = elems_[e];
    for (int d = 0; d < 3; ++d) {
      const int flo = 2 * d, fhi = 2 * d + 1;
      auto has_nb = [&](int f) {
        return !mesh.neighbors.empty() && mesh.neighbors[static_cast<size_t>(e) * kFaces + f].element >= 0;
      };
      auto is_dir = [&](int f) { return !dir_face.empty() && dir_face[static_cast<size_t>(e) * kFaces + f] != 0; };
      fe.length[d] = axis_length(mesh, e, d);
      fdm_1d_operators(basis, fe.length[d], has_nb(flo), is_dir(flo), has_nb(fhi), is_dir(fhi), fe.K[d], fe.M[d]);
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> Km(fe.K[d].data(), m,
                                                                                                   m);
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> Mm(fe.M[d].data(), m,
                                                                                                   m);
      Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Km, Mm);
      if (es.info() != Eigen::Success) throw ContractError("FdmSolver: eigen decomposition failed");
      fe.S[d].resize(static_cast<size_t>(m) * m);
      fe.lam[d].resize(m);
      for (int i = 0; i < m; ++i) {
        fe.lam[d][i] = es.eigenvalues()(i);
        for (int j = 0; j < m; ++j) fe.S[d][static_cast<size_t>(i) * m + j] = es.eigenvectors()(i, j);
      }
      double* S = S_.data() + (static_cast<size_t>(e) * 3 + d) * m * m;
      double* St = St_.data() + (static_cast<size_t>(e) * 3 + d) * m * m;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          S[static_cast<size_t>(i) * m + j] = fe.S[d][static_cast<size_t>(i) * m + j];
          St[static_cast<size_t>(j) * m + i] = fe.S[d][static_cast<size_t>(i) * m + j];
        }
    }
    double* il = inv_lambda_.data() + static_cast<size_t>(e) * m3;
    double lmax = 0.0;
    for (int k = 0; k < m; ++k)
      for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) {
          const double l = fe.lam[0][i] + fe.lam[1][j] + fe.lam[2][k];
          il[i + m * (j + m * k)] = l;
          lmax = std::max(lmax, std::abs(l));
        }
    const double eps = 1e-8 * lmax;
    for (int q = 0; q < m3; ++q) il[q] = 1.0 / (std::abs(il[q]) < eps ? eps : il[q]);
  }
  inv_lambda_f_.assign(inv_lambda_.begin(), inv_lambda_.end());
  S_f_.assign(S_.begin(), S_.end());
  St_f_.assign(St_.begin(), St_.end());
}

template <class T>
void FdmSolver::solve(const T* r, T* u, KernelCounters* counters) const {
  const int m = m_, m3 = m * m * m, mm = m * m;
  const T* S;
  const T* St;
  const T* il;
  if constexpr (std::is_same_v<T, float>) {
    S = S_f_.data();
    St = St_f_.data();
    il = inv_lambda_f_.data();
  } else {
    S = S_.data();
    St = St_.data();
    il = inv_lambda_.data();
  }
  std::vector<T> tmp(m3), work(2 * static_cast<size_t>(m3));
  const std::int64_t ne = num_elements();
  for (std::int64_t e = 0; e < ne; ++e) {
    const size_t off = static_cast<size_t>(e) * m3;
    const T* Se = S + static_cast<size_t>(e) * 3 * mm;
    const T* Ste = St + static_cast<size_t>(e) * 3 * mm;
    tensor::apply3(m, m, Ste, Ste + mm, Ste + 2 * mm, r + off, tmp.data(), work.data());
    const T* ile = il + off;
    for (int q = 0; q < m3; ++q) tmp[q] *= ile[q];
    tensor::apply3(m, m, Se, Se + mm, Se + 2 * mm, tmp.data(), u + off, work.data());
  }
  if (counters) counters->flops += ne * fdm_flops(m - 2);
}

template void FdmSolver::solve<double>(const double*, double*, KernelCounters*) const;
template void FdmSolver::solve<float>(const float*, float*, KernelCounters*) const;

void FdmSolver::apply_surrogate(std::int64_t e, const double* u, double* w) const {
  const FdmElement& fe = elems_[e];
  const int m = m_, m3 = m * m * m;
  std::vector<double> tmp(m3), work(2 * static_cast<size_t>(m3));
  std::fill(w, w + m3, 0.0);
  for (int d = 0; d < 3; ++d) {
    const double* A[3];
    for (int c = 0; c < 3; ++c) A[c] = (c == d ? fe.K[c] : fe.M[c]).data();
    tensor::apply3(m, m, A[0], A[1], A[2], u, tmp.data(), work.data());
    for (int q = 0; q < m3; ++q) w[q] += tmp[q];
  }
}

}  // namespace nekmini
