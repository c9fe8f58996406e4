#include "nekmini/coarse.hpp"

#include <algorithm>
#include <cstring>
#include <numeric>

#include "nekmini/error.hpp"

namespace nekmini {

namespace {
constexpr int kTagCoarseSetup = 5101;
constexpr int kTagCoarseRhs = 5102;
constexpr int kTagCoarseSol = 5103;
}  // namespace

CoarseSolver::CoarseSolver(Space& space, FieldKind kind) : space_(&space), kind_(kind) {
  const Mesh& mesh = space.mesh();
  const int npe = mesh.points_per_element();
  n_ = mesh.num_dofs;
  neumann_ = space.pure_neumann(kind);
  const auto mk = mesh.mask_of(kind);
  const int row = 1 + 2 * npe + npe * npe;
  std::vector<double> packed(static_cast<size_t>(mesh.num_elements) * row);
  GeomView<double> geo = space.geom();
  std::vector<double> unit(npe), col(npe);
  for (std::int64_t e = 0; e < mesh.num_elements; ++e) {
    double* out = packed.data() + e * row;
    out[0] = static_cast<double>(mesh.element_index[e]);
    for (int q = 0; q < npe; ++q) {
      out[1 + q] = static_cast<double>(mesh.dof_ids[e * npe + q]);
      out[1 + npe + q] = mk[e * npe + q];
    }
    GeomView<double> one = geo;
    one.num_elements = 1;
    for (int c = 0; c < 6; ++c) one.g[c] = geo.g[c] + e * npe;
    for (int j = 0; j < npe; ++j) {
      std::fill(unit.begin(), unit.end(), 0.0);
      unit[j] = 1.0;
      stiffness_kernel<double>(one, unit.data(), col.data());
      for (int i = 0; i < npe; ++i) out[1 + 2 * npe + i * npe + j] = col[i];
    }
  }
  auto all = space.comm().gather<double>(packed, kTagCoarseSetup);
  if (space.comm().rank() != 0) return;
  std::vector<const double*> rows;
  for (auto& blk : all)
    for (size_t o = 0; o < blk.size(); o += row) rows.push_back(blk.data() + o);
  std::sort(rows.begin(), rows.end(), [](const double* a, const double* b) { return a[0] < b[0]; });
  std::vector<unsigned char> fixed(n_, 0);
  std::vector<Eigen::Triplet<double>> trip;
  for (const double* r : rows)
    for (int q = 0; q < npe; ++q)
      if (r[1 + npe + q] == 0.0) fixed[static_cast<std::int64_t>(r[1 + q]) - 1] = 1;
  if (neumann_) fixed[0] = 1;
  for (const double* r : rows)
    for (int i = 0; i < npe; ++i) {
      const auto gi = static_cast<std::int64_t>(r[1 + i]) - 1;
      if (fixed[gi]) continue;
      for (int j = 0; j < npe; ++j) {
        const auto gj = static_cast<std::int64_t>(r[1 + j]) - 1;
        if (fixed[gj]) continue;
        trip.emplace_back(static_cast<int>(gi), static_cast<int>(gj), r[1 + 2 * npe + i * npe + j]);
      }
    }
  for (std::int64_t g = 0; g < n_; ++g)
    if (fixed[g]) trip.emplace_back(static_cast<int>(g), static_cast<int>(g), 1.0);
  A_.resize(static_cast<int>(n_), static_cast<int>(n_));
  A_.setFromTriplets(trip.begin(), trip.end());
  ldlt_ = std::make_unique<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>(A_);
  if (ldlt_->info() != Eigen::Success) throw SetupError("coarse solver: factorization failed");
  const auto& D = ldlt_->vectorD();
  for (int i = 0; i < D.size(); ++i)
    if (!(std::abs(D(i)) > 1e-13 * D.cwiseAbs().maxCoeff()))
      throw SetupError("coarse solver: operator is singular beyond the constant nullspace");
}

void CoarseSolver::solve(std::span<const double> r, std::span<double> x) {
  const Mesh& mesh = space_->mesh();
  if (r.size() != mesh.num_points() || x.size() != mesh.num_points())
    throw ContractError("coarse solve: field length mismatch");
  std::vector<double> pairs(2 * r.size());
  for (size_t i = 0; i < r.size(); ++i) {
    pairs[2 * i] = static_cast<double>(mesh.dof_ids[i]);
    pairs[2 * i + 1] = r[i];
  }
  auto all = space_->comm().gather<double>(pairs, kTagCoarseRhs);
  std::vector<double> sol;
  if (space_->comm().rank() == 0) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n_);
    for (auto& blk : all)
      for (size_t o = 0; o < blk.size(); o += 2) b(static_cast<std::int64_t>(blk[o]) - 1) = blk[o + 1];
    if (neumann_) {
      b.array() -= b.mean();
      b(0) = 0.0;
    }
    Eigen::VectorXd s = ldlt_->solve(b);
    if (neumann_) s.array() -= s.mean();
    sol.assign(s.data(), s.data() + s.size());
  }
  sol = space_->comm().bcast(std::move(sol), kTagCoarseSol);
  for (size_t i = 0; i < x.size(); ++i) x[i] = sol[mesh.dof_ids[i] - 1];
  space_->mask(x, kind_);
}

}  // namespace nekmini
