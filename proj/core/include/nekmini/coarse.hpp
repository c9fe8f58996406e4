#pragma once

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <memory>
#include <span>

#include "nekmini/space.hpp"

namespace nekmini {

// Direct solve of the assembled, masked stiffness matrix of a Space. Element
// matrices are collected on rank 0, assembled in global element order and
// factorized once. For a pure-Neumann operator the constant is removed from the
// right-hand side and the solution.
class CoarseSolver {
 public:
  CoarseSolver(Space& space, FieldKind kind);  // collective
  void solve(std::span<const double> r, std::span<double> x);  // collective
  // Assembled matrix (rank 0 only), dof numbering dof_id - 1.
  const Eigen::SparseMatrix<double>& matrix() const { return A_; }

 private:
  Space* space_;
  FieldKind kind_;
  bool neumann_ = false;
  std::int64_t n_ = 0;
  Eigen::SparseMatrix<double> A_;
  std::unique_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> ldlt_;
};

}  // namespace nekmini
