#pragma once

#include <span>
#include <vector>

namespace nekmini {

// Dense row-major matrix used for the small 1D operators.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {}

  double& operator()(int i, int j) { return data[static_cast<size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return data[static_cast<size_t>(i) * cols + j]; }

  Matrix transpose() const;
  static Matrix identity(int n);
};

Matrix operator*(const Matrix& a, const Matrix& b);

// One-dimensional Gauss-Lobatto-Legendre basis of order N: N+1 nodes on [-1,1],
// quadrature weights, and the nodal differentiation matrix.
struct SpectralBasis {
  int order = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
  Matrix diff;

  int size() const { return order + 1; }
};

struct InterpMatrix {
  int from_order = 0;
  int to_order = 0;
  Matrix values;  // (to+1) x (from+1)
};

// Legendre polynomial P_n(x) and its derivative.
double legendre(int n, double x);
double legendre_derivative(int n, double x);

// Nodes and weights only; throws InvalidOrderError for N < 1.
SpectralBasis gll_rule(int order);

// D_{ij} = h_j'(xi_i).
Matrix diff_matrix(const SpectralBasis& basis);

// gll_rule plus diff_matrix.
SpectralBasis make_basis(int order);

// Entry (a, i) = h_i(to_nodes[a]) for the cardinal polynomials of `from`.
InterpMatrix interp_matrix(const SpectralBasis& from, std::span<const double> to_nodes);

}  // namespace nekmini
