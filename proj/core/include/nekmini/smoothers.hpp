#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nekmini/fdm.hpp"
#include "nekmini/gather_scatter.hpp"
#include "nekmini/space.hpp"

namespace nekmini {

enum class SmootherKind { jacobi, cheby_jac, asm_, ras, cheby_asm, cheby_ras };
const char* to_string(SmootherKind k);
SmootherKind parse_smoother(const std::string& s);

struct SmootherConfig {
  SmootherKind kind = SmootherKind::cheby_asm;
  int cheby_degree = 2;
  double fraction_low = 0.1;
  double fraction_high = 1.1;
  int power_iters = 20;
  bool single_precision = false;
  double jacobi_weight = 2.0 / 3.0;
};

// Ids of the (N+3)^3 extended elements: own points carry their dof id, face
// halos the id of the neighbor's first interior layer, edge and corner halos 0.
// Computed on the global mesh for the listed elements.
std::vector<std::int64_t> extended_ids(const Mesh& global, std::span<const std::int64_t> elements);

// Chebyshev acceleration of an inner preconditioner P for A: degree-k
// polynomial in PA targeting [low, high]; k applications of P.
template <class T>
void chebyshev(int degree, double low, double high, const T* r, T* z, size_t n,
               const std::function<void(const T*, T*)>& apply_A, const std::function<void(const T*, T*)>& apply_P);

// Smoother for the masked, assembled Poisson operator of one multigrid level.
class Smoother {
 public:
  Smoother(Space& space, const Mesh& global, std::span<const std::int64_t> elements, const SmootherConfig& cfg,
           FieldKind kind);

  void apply(std::span<const double> r, std::span<double> z);
  double lambda_max() const { return lambda_max_; }
  const SmootherConfig& config() const { return cfg_; }

  // Inner (unaccelerated, unweighted) smoother and operator, exposed for tests.
  template <class T>
  void inner(const T* r, T* z);
  template <class T>
  void apply_A(const T* u, T* w);

 private:
  bool uses_schwarz() const;
  bool uses_chebyshev() const;
  template <class T>
  void smooth(const T* r, T* z);
  template <class T>
  void schwarz(const T* r, T* z);
  template <class T>
  void mask(T* v) const;
  double estimate_lambda_max();

  Space* space_;
  SmootherConfig cfg_;
  FieldKind kind_;
  std::vector<double> inv_diag_;
  std::vector<float> inv_diag_f_;
  // Schwarz data.
  int m_ = 0;
  GsHandle ext_gs_;
  FdmSolver fdm_;
  std::vector<double> inv_count_, owner_;
  std::vector<float> inv_count_f_, owner_f_;
  std::vector<double> ext_d_, ext_u_d_;
  std::vector<float> ext_f_, ext_u_f_;
  double lambda_max_ = 1.0;
};

}  // namespace nekmini
