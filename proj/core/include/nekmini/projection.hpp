#pragma once

#include <deque>
#include <span>
#include <vector>

#include "nekmini/krylov.hpp"
#include "nekmini/space.hpp"

namespace nekmini {

// A-orthonormal basis of previous solutions used to build initial guesses.
class ProjectionSpace {
 public:
  explicit ProjectionSpace(int capacity = 8) : capacity_(capacity) {}

  int capacity() const { return capacity_; }
  size_t size() const { return x_.size(); }
  void clear();

  // x0 = sum (x_i . b) x_i and the deflated right-hand side b - A x0.
  void project(Space& space, std::span<const double> b, std::span<double> x0, std::span<double> b_deflated) const;
  // Adds a new total solution (one operator application).
  void update(Space& space, std::span<const double> x_new, const LinearMap& apply_A);

  const std::vector<double>& vector(size_t i) const { return x_[i]; }
  const std::vector<double>& image(size_t i) const { return ax_[i]; }

 private:
  int capacity_;
  std::deque<std::vector<double>> x_, ax_;
};

}  // namespace nekmini
