#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nekmini/error.hpp"
#include "nekmini/krylov.hpp"
#include "nekmini/multigrid.hpp"
#include "oracles.hpp"

using namespace nekmini;

namespace {

struct Levels {
  std::vector<Mesh> meshes;
  std::vector<const Mesh*> ptrs;
};

Levels levels_for(const Mesh& fine) {
  Levels L;
  for (int o : pmg_schedule(fine.order)) L.meshes.push_back(o == fine.order ? fine : remesh_order(fine, o));
  for (const auto& m : L.meshes) L.ptrs.push_back(&m);
  return L;
}

Mesh box(std::array<int, 3> counts, int order, BoundaryKind bc = BoundaryKind::dirichlet) {
  BoxSpec s;
  s.counts = counts;
  s.order = order;
  s.bc.fill(bc);
  return build_box_mesh(s);
}

}  // namespace

TEST(Schedule, HalvesThenLinear) {
  EXPECT_EQ(pmg_schedule(7), (std::vector<int>{7, 3, 1}));
  EXPECT_EQ(pmg_schedule(8), (std::vector<int>{8, 4, 1}));
  EXPECT_EQ(pmg_schedule(3), (std::vector<int>{3, 1}));
  EXPECT_EQ(pmg_schedule(2), (std::vector<int>{2, 1}));
  EXPECT_EQ(pmg_schedule(1), (std::vector<int>{1}));
}

TEST(CoarseSolver, MatrixMatchesDenseStiffness) {
  const Mesh m = box({3, 2, 1}, 1);
  const oracle::Dense A = oracle::stiffness_matrix(m);
  std::vector<double> fixed(m.num_dofs, 0.0);
  for (size_t q = 0; q < m.num_points(); ++q)
    if (m.mask[0][q] == 0.0) fixed[m.dof_ids[q] - 1] = 1.0;
  oracle::single_rank([&](Comm& comm) {
    Space sp(comm, m, oracle::iota(m.num_elements));
    CoarseSolver cs(sp, FieldKind::velocity);
    const oracle::Dense C(cs.matrix());
    for (Eigen::Index i = 0; i < m.num_dofs; ++i)
      for (Eigen::Index j = 0; j < m.num_dofs; ++j) {
        double ref = A(i, j);
        if (fixed[i] != 0.0 || fixed[j] != 0.0) ref = (i == j) ? 1.0 : 0.0;
        EXPECT_NEAR(C(i, j), ref, 1e-13);
      }
  });
}

TEST(CoarseSolver, RecoversColumnsOfOperator) {
  const Mesh m = box({2, 2, 2}, 2);
  oracle::single_rank([&](Comm& comm) {
    Space sp(comm, m, oracle::iota(m.num_elements));
    CoarseSolver cs(sp, FieldKind::velocity);
    const auto mk = sp.mesh().mask_of(FieldKind::velocity);
    std::vector<double> ek(sp.size()), b(sp.size()), x(sp.size());
    for (std::int64_t k = 1; k <= m.num_dofs; k += 3) {
      for (size_t q = 0; q < ek.size(); ++q) ek[q] = (sp.mesh().dof_ids[q] == k) ? mk[q] : 0.0;
      sp.apply_helmholtz(1.0, 0.0, ek, b, FieldKind::velocity);
      cs.solve(b, x);
      EXPECT_LT(oracle::max_abs_diff(x, ek), 1e-11) << k;
    }
  });
}

TEST(CoarseSolver, NeumannSolutionHasZeroMean) {
  const Mesh m = box({2, 2, 2}, 1, BoundaryKind::periodic);
  oracle::single_rank([&](Comm& comm) {
    Space sp(comm, m, oracle::iota(m.num_elements));
    CoarseSolver cs(sp, FieldKind::velocity);
    std::mt19937_64 rng(1);
    auto u = oracle::random_continuous(sp.mesh(), rng);
    sp.project_mean(u);
    std::vector<double> b(sp.size()), x(sp.size());
    sp.apply_helmholtz(1.0, 0.0, u, b, FieldKind::velocity);
    // a constant offset in the right-hand side is ignored
    for (auto& v : b) v += 0.3;
    cs.solve(b, x);
    const std::vector<double> ones(sp.size(), 1.0);
    EXPECT_NEAR(sp.dot(x, ones), 0.0, 1e-12);
    EXPECT_LT(oracle::max_abs_diff(x, u), 1e-11);
  });
}

TEST(Multigrid, ZeroResidualGivesZero) {
  const Mesh m = box({2, 2, 1}, 5);
  const Levels L = levels_for(m);
  oracle::single_rank([&](Comm& comm) {
    const auto el = oracle::iota(m.num_elements);
    Space sp(comm, m, el);
    Multigrid mg(sp, L.ptrs, el, SmootherConfig{}, FieldKind::velocity);
    EXPECT_EQ(mg.num_levels(), 3);
    std::vector<double> r(sp.size(), 0.0), z(sp.size(), 1.0);
    mg.apply(r, z);
    EXPECT_EQ(oracle::max_abs(z), 0.0);
  });
}

TEST(Multigrid, SingleLevelIsCoarseSolve) {
  const Mesh m = box({2, 2, 2}, 1);
  const Levels L = levels_for(m);
  oracle::single_rank([&](Comm& comm) {
    const auto el = oracle::iota(m.num_elements);
    Space sp(comm, m, el);
    Multigrid mg(sp, L.ptrs, el, SmootherConfig{}, FieldKind::velocity);
    ASSERT_EQ(mg.num_levels(), 1);
    CoarseSolver cs(sp, FieldKind::velocity);
    std::mt19937_64 rng(2);
    auto r = oracle::random_continuous(sp.mesh(), rng);
    sp.mask(r, FieldKind::velocity);
    std::vector<double> a(r.size()), b(r.size());
    mg.apply(r, a);
    cs.solve(r, b);
    EXPECT_EQ(a, b);
  });
}

TEST(Multigrid, ProlongationReproducesCoarsePolynomials) {
  BoxSpec s;
  s.counts = {2, 1, 1};
  s.order = 6;
  s.bc.fill(BoundaryKind::outflow);
  const Mesh m = build_box_mesh(s);
  const Levels L = levels_for(m);
  oracle::single_rank([&](Comm& comm) {
    const auto el = oracle::iota(m.num_elements);
    Space sp(comm, m, el);
    Multigrid mg(sp, L.ptrs, el, SmootherConfig{}, FieldKind::velocity);
    Space& c = mg.level(1);
    std::vector<double> uc(c.size()), uf(sp.size(), 0.0);
    for (size_t q = 0; q < uc.size(); ++q)
      uc[q] = c.mesh().x[q] * c.mesh().y[q] + c.mesh().z[q] * c.mesh().z[q] * c.mesh().x[q];
    mg.prolong_add(0, uc, uf);
    for (size_t q = 0; q < uf.size(); ++q)
      EXPECT_NEAR(uf[q], m.x[q] * m.y[q] + m.z[q] * m.z[q] * m.x[q], 1e-13);
  });
}

TEST(Multigrid, BeatsJacobiAsPreconditioner) {
  const Mesh m = box({2, 2, 2}, 7);
  const Levels L = levels_for(m);
  oracle::single_rank([&](Comm& comm) {
    const auto el = oracle::iota(m.num_elements);
    Space sp(comm, m, el);
    std::vector<double> f(sp.size()), b(sp.size());
    for (size_t q = 0; q < f.size(); ++q) f[q] = std::sin(M_PI * m.x[q]) * std::sin(M_PI * m.y[q]) * std::sin(M_PI * m.z[q]);
    apply_mass(sp.mesh(), f, b);
    sp.assemble<double>(b);
    sp.mask(b, FieldKind::velocity);
    auto A = [&](std::span<const double> u, std::span<double> w) {
      sp.apply_helmholtz(1.0, 0.0, u, w, FieldKind::velocity);
    };
    Multigrid mg(sp, L.ptrs, el, SmootherConfig{}, FieldKind::velocity);
    SmootherConfig jc;
    jc.kind = SmootherKind::jacobi;
    Smoother jac(sp, m, el, jc, FieldKind::velocity);
    std::vector<double> x(sp.size());
    const auto rm = pcg(space_ops(sp, A, [&](std::span<const double> r, std::span<double> z) { mg.apply(r, z); }, false),
                        b, x, 1e-8, 500, true);
    const auto rj = pcg(space_ops(sp, A, [&](std::span<const double> r, std::span<double> z) { jac.apply(r, z); }, false),
                        b, x, 1e-8, 500, false);
    EXPECT_TRUE(rm.converged);
    EXPECT_TRUE(rj.converged);
    EXPECT_LT(rm.iterations, rj.iterations / 3);
  });
}

TEST(Multigrid, NeumannCycleIsPositive) {
  const Mesh m = box({2, 2, 2}, 4, BoundaryKind::periodic);
  const Levels L = levels_for(m);
  oracle::single_rank([&](Comm& comm) {
    const auto el = oracle::iota(m.num_elements);
    Space sp(comm, m, el);
    Multigrid mg(sp, L.ptrs, el, SmootherConfig{}, FieldKind::velocity);
    std::mt19937_64 rng(3);
    auto r = oracle::random_continuous(sp.mesh(), rng);
    sp.project_mean(r);
    std::vector<double> z(sp.size());
    mg.apply(r, z);
    sp.project_mean(z);
    EXPECT_GT(sp.dot(r, z), 0.0);
  });
}

TEST(Multigrid, LevelMeshesMustMatchSchedule) {
  const Mesh m = box({1, 1, 1}, 4);
  const Mesh wrong = remesh_order(m, 3);
  const Mesh lin = remesh_order(m, 1);
  oracle::single_rank([&](Comm& comm) {
    const auto el = oracle::iota(1);
    Space sp(comm, m, el);
    EXPECT_THROW(Multigrid(sp, {&m, &wrong, &lin}, el, SmootherConfig{}, FieldKind::velocity), ContractError);
    EXPECT_THROW(Multigrid(sp, {&m, &lin}, el, SmootherConfig{}, FieldKind::velocity), ContractError);
  });
}
