#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "nekmini/case_runner.hpp"
#include "nekmini/error.hpp"
#include "nekmini/navier_stokes.hpp"
#include "oracles.hpp"

using namespace nekmini;

namespace {

// Taylor conditions: sum_j beta_j (-j)^m = [m == 1] for m = 0..k.
std::vector<double> bdf_oracle(int k) {
  Eigen::MatrixXd A(k + 1, k + 1);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
  for (int m = 0; m <= k; ++m)
    for (int j = 0; j <= k; ++j) A(m, j) = std::pow(-static_cast<double>(j), m);
  rhs(1) = 1.0;
  const Eigen::VectorXd b = A.fullPivLu().solve(rhs);
  return {b.data(), b.data() + b.size()};
}

// Extrapolation to t = 0 from t = -1..-k.
std::vector<double> ext_oracle(int k) {
  Eigen::MatrixXd A(k, k);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
  for (int m = 0; m < k; ++m)
    for (int j = 1; j <= k; ++j) A(m, j - 1) = std::pow(-static_cast<double>(j), m);
  rhs(0) = 1.0;
  const Eigen::VectorXd a = A.fullPivLu().solve(rhs);
  return {a.data(), a.data() + a.size()};
}

CaseConfig taylor_green_case(int steps) {
  CaseConfig c;
  c.case_type = "flow";
  c.extent = {2 * std::numbers::pi, 2 * std::numbers::pi, 2 * std::numbers::pi};
  c.counts = {4, 4, 1};
  c.order = 6;
  c.bc.fill(BoundaryKind::periodic);
  c.dt = 1e-3;
  c.steps = steps;
  c.time_order = 2;
  c.Re = 100.0;
  c.ic = "taylor_green";
  c.pressure_tol = 1e-8;
  c.advection_variant = "blocked2d";
  return c;
}

}  // namespace

TEST(TimeCoefficients, MatchTaylorConditions) {
  for (int k = 1; k <= 3; ++k) {
    const TimeCoeffs c = bdf_ext_coeffs(k);
    const auto b = bdf_oracle(k);
    const auto a = ext_oracle(k);
    ASSERT_EQ(c.beta.size(), static_cast<size_t>(k + 1));
    ASSERT_EQ(c.alpha.size(), static_cast<size_t>(k));
    for (int j = 0; j <= k; ++j) EXPECT_NEAR(c.beta[j], b[j], 1e-13);
    for (int j = 0; j < k; ++j) EXPECT_NEAR(c.alpha[j], a[j], 1e-13);
  }
  EXPECT_THROW(bdf_ext_coeffs(4), Error);
  EXPECT_THROW(bdf_ext_coeffs(0), Error);
}

TEST(TimeCoefficients, LagrangeWeightsReproduceQuadratics) {
  const std::vector<double> ts{-1.0, -0.5, 0.0};
  const auto w = lagrange_weights(ts, 0.3);
  double s0 = 0.0, s2 = 0.0;
  for (size_t i = 0; i < ts.size(); ++i) {
    s0 += w[i];
    s2 += w[i] * ts[i] * ts[i];
  }
  EXPECT_NEAR(s0, 1.0, 1e-15);
  EXPECT_NEAR(s2, 0.09, 1e-15);
}

TEST(TaylorGreen, DecaysAndIsDivergenceFree) {
  const auto a = taylor_green(0.3, 1.1, 0.0, 10.0);
  const auto b = taylor_green(0.3, 1.1, 2.0, 10.0);
  EXPECT_NEAR(b[0], a[0] * std::exp(-0.4), 1e-15);
  EXPECT_EQ(a[2], 0.0);
  const double h = 1e-6;
  const double div = (taylor_green(0.3 + h, 1.1, 0, 1)[0] - taylor_green(0.3 - h, 1.1, 0, 1)[0]) / (2 * h) +
                     (taylor_green(0.3, 1.1 + h, 0, 1)[1] - taylor_green(0.3, 1.1 - h, 0, 1)[1]) / (2 * h);
  EXPECT_NEAR(div, 0.0, 1e-9);
}

TEST(Cfl, UniformFlowOnBox) {
  BoxSpec s;
  s.counts = {2, 1, 1};
  s.order = 4;
  s.extent = {2.0, 1.0, 1.0};
  const Mesh m = build_box_mesh(s);
  const auto nodes = oracle::gll_nodes(4);
  const double dmin = 0.5 * (nodes[1] - nodes[0]);  // element length 1 in x
  oracle::single_rank([&](Comm& comm) {
    Space sp(comm, m, oracle::iota(m.num_elements));
    Vec3Field u{std::vector<double>(sp.size(), 2.0), std::vector<double>(sp.size(), 0.0),
                std::vector<double>(sp.size(), 0.0)};
    EXPECT_NEAR(compute_cfl(sp, u, 0.01), 0.01 * 2.0 / dmin, 1e-12);
    EXPECT_NEAR(max_velocity(sp, u), 2.0, 1e-15);
    u[0].assign(sp.size(), 0.0);
    EXPECT_EQ(compute_cfl(sp, u, 0.01), 0.0);
  });
}

TEST(FlowSolver, ZeroFlowStaysZero) {
  CaseConfig c;
  c.counts = {2, 2, 1};
  c.order = 4;
  c.dt = 1e-2;
  c.steps = 3;
  c.ic = "zero";
  c.advection_variant = "blocked2d";
  const RunReport r = run_case(c);
  ASSERT_EQ(r.exit_code, 0) << r.failure;
  ASSERT_EQ(r.steps.size(), 3u);
  for (const auto& s : r.steps) EXPECT_EQ(s.max_u, 0.0);
  for (int p = 0; p < 3; ++p) EXPECT_EQ(oracle::max_abs(r.u[p]), 0.0);
}

TEST(FlowSolver, TaylorGreenTracksExactSolution) {
  const RunReport r = run_case(taylor_green_case(10));
  ASSERT_EQ(r.exit_code, 0) << r.failure;
  ASSERT_EQ(r.steps.size(), 10u);
  for (const auto& s : r.steps) {
    EXPECT_LT(s.err, 1e-6);
    EXPECT_LE(s.div_rel, 1e-6);
  }
  EXPECT_NEAR(r.steps.back().max_u, std::exp(-2.0 * 0.01 / 100.0), 1e-6);
}

TEST(FlowSolver, CharacteristicsAgreeWithBdfExt) {
  CaseConfig c = taylor_green_case(10);
  const RunReport a = run_case(c);
  c.scheme = "char";
  const RunReport b = run_case(c);
  ASSERT_EQ(b.exit_code, 0) << b.failure;
  EXPECT_LT(b.steps.back().err, 1e-6);
  EXPECT_LT(oracle::max_abs_diff(a.u[0], b.u[0]), 1e-6);
}

TEST(FlowSolver, ForcedChannelAcceleratesAlongForce) {
  CaseConfig c;
  c.counts = {2, 2, 2};
  c.order = 4;
  c.bc = {BoundaryKind::periodic, BoundaryKind::periodic, BoundaryKind::dirichlet,
          BoundaryKind::dirichlet, BoundaryKind::periodic, BoundaryKind::periodic};
  c.dt = 5e-3;
  c.steps = 6;
  c.Re = 10.0;
  c.forcing = {1.0, 0.0, 0.0};
  c.pressure_tol = 1e-8;
  c.advection_variant = "blocked2d";
  const RunReport r = run_case(c);
  ASSERT_EQ(r.exit_code, 0) << r.failure;
  // velocity grows from rest under the body force
  EXPECT_GT(r.steps.back().max_u, r.steps.front().max_u);
  for (const auto& s : r.steps) EXPECT_LE(s.div_rel, 1e-6);
  EXPECT_GT(oracle::max_abs(r.u[0]), 0.0);
  EXPECT_LT(oracle::max_abs(r.u[1]), 1e-6 * oracle::max_abs(r.u[0]));
}

TEST(FlowSolver, RejectsCharacteristicsAboveSecondOrder) {
  CaseConfig c = taylor_green_case(2);
  c.scheme = "char";
  c.time_order = 3;
  EXPECT_THROW(run_case(c), ConfigError);
}
