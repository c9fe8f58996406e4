#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <random>
#include <thread>

#include "nekmini/advection.hpp"
#include "nekmini/error.hpp"
#include "oracles.hpp"

using namespace nekmini;

namespace {

Mesh make_mesh(std::array<int, 3> counts, int order, bool deform) {
  BoxSpec s;
  s.counts = counts;
  s.order = order;
  if (deform)
    s.deformation = [](const Point3& p) {
      return Point3{p[0] + 0.07 * p[1] * p[2], p[1] + 0.05 * std::sin(2.0 * p[0]), p[2] + 0.04 * p[0] * p[1]};
    };
  return build_box_mesh(s);
}

}  // namespace

TEST(Advection, DefaultDealiasingGrid) {
  EXPECT_EQ(default_nq(1), 3);
  EXPECT_EQ(default_nq(2), 5);
  EXPECT_EQ(default_nq(7), 12);
  EXPECT_EQ(default_nq(8), 14);
}

TEST(Advection, ConstantFieldGivesZero) {
  const Mesh m = make_mesh({2, 1, 1}, 5, true);
  const SpectralBasis b = make_basis(5);
  const DealiasOperator op(m, b, default_nq(5));
  std::mt19937_64 rng(1);
  const auto cx = oracle::random_vector(m.num_points(), rng);
  const auto cy = oracle::random_vector(m.num_points(), rng);
  const auto cz = oracle::random_vector(m.num_points(), rng);
  const auto c = op.contravariant(cx, cy, cz);
  std::vector<double> u(m.num_points(), 2.0), out(u.size());
  for (auto v : {AdvectionVariant::blocked2d, AdvectionVariant::full3d}) {
    op.apply(c, u, out, v);
    EXPECT_LT(oracle::max_abs(out), 1e-12);
  }
}

TEST(Advection, UniformFlowOnLinearField) {
  const Mesh m = make_mesh({2, 2, 1}, 4, false);
  const SpectralBasis b = make_basis(4);
  const DealiasOperator op(m, b, default_nq(4));
  std::vector<double> cx(m.num_points(), 1.0), zero(m.num_points(), 0.0), u(m.num_points()), out(u.size());
  for (size_t q = 0; q < u.size(); ++q) u[q] = m.x[q];
  op.apply(op.contravariant(cx, zero, zero), u, out, AdvectionVariant::blocked2d);
  // (phi_i, 1) is the diagonal mass on an affine element
  for (size_t q = 0; q < u.size(); ++q) EXPECT_NEAR(out[q], m.mass[q], 1e-14);
}

TEST(Advection, VariantsAgree) {
  for (int order : {2, 5, 7}) {
    const Mesh m = make_mesh({2, 1, 1}, order, true);
    const SpectralBasis b = make_basis(order);
    const DealiasOperator op(m, b, default_nq(order));
    std::mt19937_64 rng(order);
    const auto cx = oracle::random_vector(m.num_points(), rng);
    const auto cy = oracle::random_vector(m.num_points(), rng);
    const auto cz = oracle::random_vector(m.num_points(), rng);
    const auto u = oracle::random_vector(m.num_points(), rng);
    const auto c = op.contravariant(cx, cy, cz);
    std::vector<double> a(u.size()), f(u.size());
    op.apply(c, u, a, AdvectionVariant::blocked2d);
    op.apply(c, u, f, AdvectionVariant::full3d);
    const double scale = oracle::max_abs(a);
    EXPECT_LT(oracle::max_abs_diff(a, f), 1e-14 * 10 * scale) << order;
  }
}

TEST(Advection, MatchesDenseOracle) {
  for (int order : {1, 2, 3}) {
    const Mesh m = make_mesh({2, 1, 1}, order, true);
    const SpectralBasis b = make_basis(order);
    const int nq = default_nq(order);
    const DealiasOperator op(m, b, nq);
    std::mt19937_64 rng(10 + order);
    const auto cx = oracle::random_vector(m.num_points(), rng);
    const auto cy = oracle::random_vector(m.num_points(), rng);
    const auto cz = oracle::random_vector(m.num_points(), rng);
    const auto u = oracle::random_vector(m.num_points(), rng);
    std::vector<double> out(u.size());
    op.apply(op.contravariant(cx, cy, cz), u, out, AdvectionVariant::blocked2d);
    const int npe = m.points_per_element();
    for (std::int64_t e = 0; e < m.num_elements; ++e) {
      const size_t off = static_cast<size_t>(e) * npe;
      auto sl = [&](const std::vector<double>& v) { return std::span<const double>(v.data() + off, npe); };
      const oracle::Dense C = oracle::ElementOracle(m, e).advection(nq, sl(cx), sl(cy), sl(cz));
      const oracle::Vec ref = C * Eigen::Map<const oracle::Vec>(u.data() + off, npe);
      for (int i = 0; i < npe; ++i) EXPECT_NEAR(out[off + i], ref(i), 1e-12) << order;
    }
  }
}

TEST(Advection, CoarseGridRejected) {
  const Mesh m = make_mesh({1, 1, 1}, 4, false);
  EXPECT_THROW(DealiasOperator(m, make_basis(4), 4), InvalidOrderError);
  EXPECT_NO_THROW(DealiasOperator(m, make_basis(4), 5));
}

TEST(Advection, Counters) {
  const Mesh m = make_mesh({3, 1, 1}, 3, false);
  const DealiasOperator op(m, make_basis(3), 6);
  std::vector<double> c1(m.num_points(), 1.0), u(m.num_points(), 1.0), out(u.size());
  KernelCounters k;
  op.apply(op.contravariant(c1, c1, c1), u, out, AdvectionVariant::full3d, &k);
  EXPECT_EQ(k.flops, 3 * op.flops_per_element());
  EXPECT_GT(k.flops, 0);
}

TEST(Advection, VariantNames) {
  EXPECT_EQ(parse_advection_variant("blocked2d"), AdvectionVariant::blocked2d);
  EXPECT_EQ(parse_advection_variant("full3d"), AdvectionVariant::full3d);
  EXPECT_EQ(parse_advection_variant("auto"), AdvectionVariant::automatic);
  EXPECT_STREQ(to_string(AdvectionVariant::full3d), "full3d");
  EXPECT_THROW(parse_advection_variant("fast"), ContractError);
}

TEST(SelectFastest, PicksQuickestCandidate) {
  using namespace std::chrono_literals;
  std::vector<std::function<void()>> c{[] { std::this_thread::sleep_for(3ms); }, [] {},
                                       [] { std::this_thread::sleep_for(1ms); }};
  EXPECT_EQ(select_fastest(c, 3), 1);
}

TEST(SelectFastest, FineGridRestrictsToBlocked) {
  const Mesh m = make_mesh({1, 1, 1}, 7, false);
  const DealiasOperator op(m, make_basis(7), 12);
  EXPECT_EQ(select_advection_variant(op, 1), AdvectionVariant::blocked2d);
}
