#include <gtest/gtest.h>

#include <cmath>

#include "nekmini/basis.hpp"
#include "nekmini/error.hpp"
#include "oracles.hpp"

using namespace nekmini;

TEST(GllRule, OrderOneIsEndpoints) {
  const auto b = make_basis(1);
  EXPECT_DOUBLE_EQ(b.nodes[0], -1.0);
  EXPECT_DOUBLE_EQ(b.nodes[1], 1.0);
  EXPECT_DOUBLE_EQ(b.weights[0], 1.0);
  EXPECT_DOUBLE_EQ(b.weights[1], 1.0);
}

TEST(GllRule, OrderTwo) {
  const auto b = make_basis(2);
  EXPECT_NEAR(b.nodes[1], 0.0, 1e-15);
  EXPECT_NEAR(b.weights[0], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(b.weights[1], 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(b.weights[2], 1.0 / 3.0, 1e-15);
  double s = 0.0;
  for (int j = 0; j < 3; ++j) s += b.weights[j] * b.nodes[j] * b.nodes[j];
  EXPECT_NEAR(s, 2.0 / 3.0, 1e-15);
}

TEST(GllRule, MatchesIndependentRootFinder) {
  for (int N = 1; N <= 16; ++N) {
    const auto b = gll_rule(N);
    const auto x = oracle::gll_nodes(N);
    const auto w = oracle::gll_weights(N);
    for (int i = 0; i <= N; ++i) {
      EXPECT_NEAR(b.nodes[i], x[i], 1e-14) << "N=" << N;
      EXPECT_NEAR(b.weights[i], w[i], 1e-14) << "N=" << N;
    }
  }
}

TEST(GllRule, ExactToDegree2NMinus1) {
  for (int N = 1; N <= 12; ++N) {
    const auto b = gll_rule(N);
    for (int d = 0; d <= 2 * N - 1; ++d) {
      double s = 0.0;
      for (int j = 0; j <= N; ++j) s += b.weights[j] * std::pow(b.nodes[j], d);
      const double exact = d % 2 ? 0.0 : 2.0 / (d + 1);
      EXPECT_NEAR(s, exact, 1e-13) << "N=" << N << " degree " << d;
    }
  }
}

TEST(GllRule, NodesSymmetricAndSorted) {
  for (int N = 1; N <= 20; ++N) {
    const auto b = gll_rule(N);
    for (int i = 0; i <= N; ++i) {
      EXPECT_NEAR(b.nodes[i], -b.nodes[N - i], 1e-15);
      EXPECT_NEAR(b.weights[i], b.weights[N - i], 1e-15);
      if (i > 0) EXPECT_LT(b.nodes[i - 1], b.nodes[i]);
    }
  }
}

TEST(GllRule, RejectsOrderZero) { EXPECT_THROW(gll_rule(0), InvalidOrderError); }

TEST(DiffMatrix, OrderOne) {
  const auto b = make_basis(1);
  EXPECT_NEAR(b.diff(0, 0), -0.5, 1e-15);
  EXPECT_NEAR(b.diff(0, 1), 0.5, 1e-15);
  EXPECT_NEAR(b.diff(1, 0), -0.5, 1e-15);
  EXPECT_NEAR(b.diff(1, 1), 0.5, 1e-15);
}

TEST(DiffMatrix, DifferentiatesPolynomialsExactly) {
  for (int N = 2; N <= 14; ++N) {
    const auto b = make_basis(N);
    for (int i = 0; i <= N; ++i) {
      double d1 = 0.0, d2 = 0.0;
      for (int j = 0; j <= N; ++j) {
        d1 += b.diff(i, j) * b.nodes[j];
        d2 += b.diff(i, j) * b.nodes[j] * b.nodes[j];
      }
      EXPECT_NEAR(d1, 1.0, 1e-12) << N;
      EXPECT_NEAR(d2, 2.0 * b.nodes[i], 1e-12) << N;
    }
  }
}

TEST(DiffMatrix, MatchesLagrangeDerivatives) {
  for (int N = 1; N <= 10; ++N) {
    const auto b = make_basis(N);
    for (int i = 0; i <= N; ++i)
      for (int j = 0; j <= N; ++j)
        EXPECT_NEAR(b.diff(i, j), oracle::lagrange_deriv(b.nodes, j, b.nodes[i]), 1e-11) << N;
  }
}

TEST(DiffMatrix, RowSumsVanish) {
  for (int N = 1; N <= 16; ++N) {
    const auto b = make_basis(N);
    for (int i = 0; i <= N; ++i) {
      double s = 0.0;
      for (int j = 0; j <= N; ++j) s += b.diff(i, j);
      EXPECT_NEAR(s, 0.0, 1e-12);
    }
  }
}

TEST(Interp, SameNodesIsIdentity) {
  const auto b = make_basis(2);
  const auto J = interp_matrix(b, b.nodes);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(J.values(i, j), i == j ? 1.0 : 0.0, 1e-15);
}

TEST(Interp, LinearToQuadratic) {
  const auto b1 = make_basis(1), b2 = make_basis(2);
  const auto J = interp_matrix(b1, b2.nodes);
  const double expect[3][2] = {{1, 0}, {0.5, 0.5}, {0, 1}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) EXPECT_NEAR(J.values(i, j), expect[i][j], 1e-15);
}

TEST(Interp, ReproducesCubic) {
  const auto b4 = make_basis(4), b7 = make_basis(7);
  const auto J = interp_matrix(b4, b7.nodes);
  for (int a = 0; a <= 7; ++a) {
    double s = 0.0;
    for (int j = 0; j <= 4; ++j) s += J.values(a, j) * std::pow(b4.nodes[j], 3);
    EXPECT_NEAR(s, std::pow(b7.nodes[a], 3), 1e-13);
  }
}

TEST(Interp, RowsArePartitionOfUnity) {
  const auto b5 = make_basis(5);
  const std::vector<double> pts{-0.9, -0.3, 0.0, 0.41, 0.77};
  const auto J = interp_matrix(b5, pts);
  for (size_t a = 0; a < pts.size(); ++a) {
    double s = 0.0;
    for (int j = 0; j <= 5; ++j) {
      s += J.values(static_cast<int>(a), j);
      EXPECT_NEAR(J.values(static_cast<int>(a), j), oracle::lagrange(b5.nodes, j, pts[a]), 1e-13);
    }
    EXPECT_NEAR(s, 1.0, 1e-13);
  }
}
