#include "nekmini/krylov.hpp"

#include <algorithm>
#include <cmath>

#include "nekmini/error.hpp"

namespace nekmini {

KrylovOps space_ops(Space& space, LinearMap apply_A, LinearMap apply_M, bool remove_mean) {
  KrylovOps ops;
  ops.apply_A = std::move(apply_A);
  ops.apply_M = std::move(apply_M);
  ops.dot = [&space](std::span<const double> a, std::span<const double> b) { return space.dot(a, b); };
  if (remove_mean) ops.project = [&space](std::span<double> v) { space.project_mean(v); };
  return ops;
}

SolveResult pcg(const KrylovOps& ops, std::span<const double> b, std::span<double> x, double tol, int max_iter,
                bool flexible, double ref_norm) {
  const size_t n = b.size();
  if (x.size() != n) throw ContractError("pcg: solution length mismatch");
  SolveResult res;
  std::fill(x.begin(), x.end(), 0.0);
  std::vector<double> r(b.begin(), b.end()), z(n), p(n), w(n), r_prev;
  if (ops.project) ops.project(r);
  double rnorm = std::sqrt(std::max(0.0, ops.dot(r, r)));
  res.reference = ref_norm < 0.0 ? rnorm : ref_norm;
  res.history.push_back(rnorm);
  res.residual = rnorm;
  const double target = tol * res.reference;
  if (rnorm <= target) {
    res.converged = true;
    return res;
  }
  auto precondition = [&] {
    if (ops.apply_M)
      ops.apply_M(r, z);
    else
      std::copy(r.begin(), r.end(), z.begin());
    if (ops.project) ops.project(z);
  };
  precondition();
  p = z;
  double rz = ops.dot(r, z);
  for (int k = 1; k <= max_iter; ++k) {
    ops.apply_A(p, w);
    const double pap = ops.dot(p, w);
    if (!(pap > 0.0)) throw BreakdownError("pcg: p^T A p = " + std::to_string(pap) + " at iteration " + std::to_string(k));
    const double alpha = rz / pap;
    if (flexible) r_prev = r;
    for (size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * w[i];
    }
    if (ops.project) ops.project(r);
    rnorm = std::sqrt(std::max(0.0, ops.dot(r, r)));
    res.history.push_back(rnorm);
    res.iterations = k;
    res.residual = rnorm;
    if (rnorm <= target) {
      res.converged = true;
      return res;
    }
    precondition();
    double beta;
    const double rz_new = ops.dot(r, z);
    if (flexible) {
      for (size_t i = 0; i < n; ++i) r_prev[i] = r[i] - r_prev[i];
      beta = ops.dot(z, r_prev) / rz;
    } else {
      beta = rz_new / rz;
    }
    rz = rz_new;
    for (size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  return res;
}

}  // namespace nekmini
