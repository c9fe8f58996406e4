#include "nekmini/basis.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "nekmini/error.hpp"

namespace nekmini {

Matrix Matrix::transpose() const {
  Matrix t(cols, rows);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows) throw ContractError("matrix product shape mismatch");
  Matrix c(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int k = 0; k < a.cols; ++k) {
      const double aik = a(i, k);
      for (int j = 0; j < b.cols; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

double legendre(int n, double x) {
  if (n == 0) return 1.0;
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

double legendre_derivative(int n, double x) {
  if (n == 0) return 0.0;
  // Recurrence P'_k = P'_{k-2} + (2k-1) P_{k-1}; avoids the 1/(1-x^2) singularity.
  double dm2 = 0.0, dm1 = 1.0;  // P'_0, P'_1
  if (n == 1) return dm1;
  double pkm1 = x;  // P_1
  double pkm2 = 1.0;
  for (int k = 2; k <= n; ++k) {
    const double dk = dm2 + (2.0 * k - 1.0) * pkm1;
    const double pk = ((2.0 * k - 1.0) * x * pkm1 - (k - 1.0) * pkm2) / k;
    dm2 = dm1;
    dm1 = dk;
    pkm2 = pkm1;
    pkm1 = pk;
  }
  return dm1;
}

SpectralBasis gll_rule(int order) {
  if (order < 1) throw InvalidOrderError("GLL order must be >= 1, got " + std::to_string(order));
  const int n = order;
  SpectralBasis b;
  b.order = n;
  b.nodes.assign(n + 1, 0.0);
  b.weights.assign(n + 1, 0.0);
  b.nodes[0] = -1.0;
  b.nodes[n] = 1.0;
  // Interior nodes are the roots of (1-r^2) P'_N, whose derivative is -N(N+1) P_N.
  for (int j = 1; j < n; ++j) {
    double x = -std::cos(std::numbers::pi * j / n);
    for (int it = 0; it < 100; ++it) {
      const double f = (1.0 - x * x) * legendre_derivative(n, x);
      const double df = -n * (n + 1.0) * legendre(n, x);
      const double dx = f / df;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    b.nodes[j] = x;
  }
  for (int j = 0; j <= n / 2; ++j) {
    const double s = 0.5 * (b.nodes[n - j] - b.nodes[j]);
    b.nodes[j] = -s;
    b.nodes[n - j] = s;
  }
  if (n % 2 == 0) b.nodes[n / 2] = 0.0;
  for (int j = 0; j <= n; ++j) {
    const double p = legendre(n, b.nodes[j]);
    b.weights[j] = 2.0 / (n * (n + 1.0) * p * p);
  }
  return b;
}

Matrix diff_matrix(const SpectralBasis& basis) {
  const int n = basis.order;
  const auto& x = basis.nodes;
  Matrix d(n + 1, n + 1);
  std::vector<double> pn(n + 1);
  for (int i = 0; i <= n; ++i) pn[i] = legendre(n, x[i]);
  for (int i = 0; i <= n; ++i) {
    double rowsum = 0.0;
    for (int j = 0; j <= n; ++j) {
      if (i == j) continue;
      d(i, j) = pn[i] / (pn[j] * (x[i] - x[j]));
      rowsum += d(i, j);
    }
    // Negative-sum diagonal: rows annihilate constants to roundoff.
    d(i, i) = -rowsum;
  }
  return d;
}

SpectralBasis make_basis(int order) {
  SpectralBasis b = gll_rule(order);
  b.diff = diff_matrix(b);
  return b;
}

InterpMatrix interp_matrix(const SpectralBasis& from, std::span<const double> to_nodes) {
  const int n = from.order;
  const auto& x = from.nodes;
  std::vector<double> bary(n + 1, 1.0);
  for (int j = 0; j <= n; ++j)
    for (int k = 0; k <= n; ++k)
      if (k != j) bary[j] /= (x[j] - x[k]);

  InterpMatrix im;
  im.from_order = n;
  im.to_order = static_cast<int>(to_nodes.size()) - 1;
  im.values = Matrix(static_cast<int>(to_nodes.size()), n + 1);
  for (size_t a = 0; a < to_nodes.size(); ++a) {
    const double r = to_nodes[a];
    int exact = -1;
    for (int j = 0; j <= n; ++j)
      if (r == x[j]) exact = j;
    if (exact >= 0) {
      im.values(static_cast<int>(a), exact) = 1.0;
      continue;
    }
    double denom = 0.0;
    for (int j = 0; j <= n; ++j) denom += bary[j] / (r - x[j]);
    for (int j = 0; j <= n; ++j)
      im.values(static_cast<int>(a), j) = bary[j] / (r - x[j]) / denom;
  }
  return im;
}

}  // namespace nekmini
