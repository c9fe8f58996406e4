#pragma once

#include <functional>
#include <span>
#include <vector>

#include "nekmini/space.hpp"

namespace nekmini {

using LinearMap = std::function<void(std::span<const double>, std::span<double>)>;

struct KrylovOps {
  LinearMap apply_A;
  LinearMap apply_M;  // empty: identity
  std::function<double(std::span<const double>, std::span<const double>)> dot;
  std::function<void(std::span<double>)> project;  // optional nullspace removal
};

// Vector algebra of a Space (assembled dot products, mean projection when asked).
KrylovOps space_ops(Space& space, LinearMap apply_A, LinearMap apply_M, bool remove_mean);

struct SolveResult {
  int iterations = 0;
  bool converged = false;
  double residual = 0.0;   // final residual norm
  double reference = 0.0;  // norm the tolerance is relative to
  std::vector<double> history;
};

// Preconditioned CG for A x = b starting from x = 0, stopping when
// |r| <= tol * ref_norm (ref_norm < 0 selects |b|). The flexible variant uses
// the Polak-Ribiere beta. Throws BreakdownError when p^T A p <= 0.
SolveResult pcg(const KrylovOps& ops, std::span<const double> b, std::span<double> x, double tol, int max_iter,
                bool flexible, double ref_norm = -1.0);

}  // namespace nekmini
