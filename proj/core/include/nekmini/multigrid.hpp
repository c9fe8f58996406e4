#pragma once

#include <memory>
#include <span>
#include <vector>

#include "nekmini/coarse.hpp"
#include "nekmini/smoothers.hpp"
#include "nekmini/space.hpp"

namespace nekmini {

// Orders {N, max(N/2,1), 1} with duplicates removed.
std::vector<int> pmg_schedule(int order);

// p-multigrid V-cycle for the masked Poisson operator. Level 0 is the caller's
// Space; coarser levels are rediscretized on the same elements.
class Multigrid {
 public:
  // global_levels[l] is the global mesh at order pmg_schedule(N)[l].
  Multigrid(Space& top, const std::vector<const Mesh*>& global_levels, std::span<const std::int64_t> elements,
            const SmootherConfig& smoother, FieldKind kind);

  void apply(std::span<const double> r, std::span<double> z);
  int num_levels() const { return static_cast<int>(levels_.size()); }
  Space& level(int l) { return *levels_[l]; }
  Smoother& smoother(int l) { return *smoothers_[l]; }
  CoarseSolver& coarse() { return *coarse_; }

  // Transfers between level l and l+1 (exposed for tests).
  void restrict_to(int l, std::span<const double> fine, std::span<double> coarse);
  void prolong_add(int l, std::span<const double> coarse, std::span<double> fine);

 private:
  void cycle(int l, std::span<const double> r, std::span<double> z);

  FieldKind kind_;
  std::vector<Space*> levels_;
  std::vector<std::unique_ptr<Space>> owned_;
  std::vector<std::unique_ptr<Smoother>> smoothers_;
  std::vector<std::vector<double>> J_, Jt_;  // J_[l]: (n1_l x n1_{l+1})
  std::unique_ptr<CoarseSolver> coarse_;
};

}  // namespace nekmini
