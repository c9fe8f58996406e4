#include "nekmini/projection.hpp"

#include <algorithm>
#include <cmath>

#include "nekmini/error.hpp"

namespace nekmini {

void ProjectionSpace::clear() {
  x_.clear();
  ax_.clear();
}

void ProjectionSpace::project(Space& space, std::span<const double> b, std::span<double> x0,
                              std::span<double> b_deflated) const {
  std::fill(x0.begin(), x0.end(), 0.0);
  std::copy(b.begin(), b.end(), b_deflated.begin());
  if (x_.empty()) return;
  std::vector<std::pair<std::span<const double>, std::span<const double>>> pairs;
  for (const auto& x : x_) pairs.emplace_back(x, b);
  const auto alpha = space.dots(pairs);
  for (size_t i = 0; i < x_.size(); ++i)
    for (size_t q = 0; q < x0.size(); ++q) {
      x0[q] += alpha[i] * x_[i][q];
      b_deflated[q] -= alpha[i] * ax_[i][q];
    }
}

void ProjectionSpace::update(Space& space, std::span<const double> x_new, const LinearMap& apply_A) {
  if (capacity_ <= 0) return;
  const size_t n = x_new.size();
  std::vector<double> x(x_new.begin(), x_new.end()), w(n);
  apply_A(x, w);
  const double norm_new = std::sqrt(std::max(0.0, space.dot(x, w)));
  if (!(norm_new > 0.0)) return;
  for (int pass = 0; pass < 2 && !x_.empty(); ++pass) {
    std::vector<std::pair<std::span<const double>, std::span<const double>>> pairs;
    for (const auto& xi : x_) pairs.emplace_back(xi, w);
    const auto c = space.dots(pairs);
    for (size_t i = 0; i < x_.size(); ++i)
      for (size_t q = 0; q < n; ++q) {
        x[q] -= c[i] * x_[i][q];
        w[q] -= c[i] * ax_[i][q];
      }
  }
  double norm = std::sqrt(std::max(0.0, space.dot(x, w)));
  if (norm < 1e-10 * norm_new) {
    clear();
    x.assign(x_new.begin(), x_new.end());
    apply_A(x, w);
    norm = norm_new;
  }
  if (static_cast<int>(x_.size()) >= capacity_) {
    x_.pop_front();
    ax_.pop_front();
  }
  for (size_t q = 0; q < n; ++q) {
    x[q] /= norm;
    w[q] /= norm;
  }
  x_.push_back(std::move(x));
  ax_.push_back(std::move(w));
}

}  // namespace nekmini
