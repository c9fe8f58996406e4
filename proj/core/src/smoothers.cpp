#include "nekmini/smoothers.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "nekmini/error.hpp"

namespace nekmini {

const char* to_string(SmootherKind k) {
  switch (k) {
    case SmootherKind::jacobi: return "jacobi";
    case SmootherKind::cheby_jac: return "cheby_jac";
    case SmootherKind::asm_: return "asm";
    case SmootherKind::ras: return "ras";
    case SmootherKind::cheby_asm: return "cheby_asm";
    case SmootherKind::cheby_ras: return "cheby_ras";
  }
  return "?";
}

SmootherKind parse_smoother(const std::string& s) {
  for (auto k : {SmootherKind::jacobi, SmootherKind::cheby_jac, SmootherKind::asm_, SmootherKind::ras,
                 SmootherKind::cheby_asm, SmootherKind::cheby_ras})
    if (s == to_string(k)) return k;
  throw ContractError("unknown smoother '" + s + "'");
}

std::vector<std::int64_t> extended_ids(const Mesh& global, std::span<const std::int64_t> elements) {
  const int N = global.order, n1 = N + 1, m = N + 3, m3 = m * m * m, npe = global.points_per_element();
  std::unordered_map<std::int64_t, std::int64_t> pos;
  for (std::int64_t e = 0; e < global.num_elements; ++e)
    pos[global.element_index.empty() ? e : global.element_index[e]] = e;
  auto node = [&](std::int64_t e, int i, int j, int k) {
    return static_cast<size_t>(e) * npe + i + n1 * (j + static_cast<size_t>(n1) * k);
  };
  // (i,j,k) of face point (p,q) on face f, optionally shifted inward by `depth`.
  auto face_point = [&](int f, int p, int q, int depth, int ijk[3]) {
    const int d = f / 2, side = f % 2;
    const int a = (d + 1) % 3, b = (d + 2) % 3;
    ijk[d] = side == 0 ? depth : N - depth;
    ijk[a] = p;
    ijk[b] = q;
  };
  std::vector<std::int64_t> ids(elements.size() * m3, 0);
  for (size_t a = 0; a < elements.size(); ++a) {
    const std::int64_t e = elements[a];
    std::int64_t* out = ids.data() + a * m3;
    for (int k = 0; k < n1; ++k)
      for (int j = 0; j < n1; ++j)
        for (int i = 0; i < n1; ++i) out[(i + 1) + m * ((j + 1) + m * (k + 1))] = global.dof_ids[node(e, i, j, k)];
    for (int f = 0; f < kFaces; ++f) {
      const FaceNeighbor& nb = global.neighbors[static_cast<size_t>(e) * kFaces + f];
      if (nb.element < 0) continue;
      const std::int64_t e2 = pos.at(nb.element);
      std::unordered_map<std::int64_t, size_t> on_face;
      for (int q = 0; q < n1; ++q)
        for (int p = 0; p < n1; ++p) {
          int c[3];
          face_point(nb.face, p, q, 0, c);
          const std::int64_t id = global.dof_ids[node(e2, c[0], c[1], c[2])];
          int in[3];
          face_point(nb.face, p, q, 1, in);
          on_face[id] = node(e2, in[0], in[1], in[2]);
        }
      for (int q = 0; q < n1; ++q)
        for (int p = 0; p < n1; ++p) {
          int c[3];
          face_point(f, p, q, 0, c);
          const auto it = on_face.find(global.dof_ids[node(e, c[0], c[1], c[2])]);
          if (it == on_face.end()) throw SetupError("extended_ids: face points do not match the neighbor");
          int x[3] = {c[0] + 1, c[1] + 1, c[2] + 1};
          const int d = f / 2;
          x[d] = (f % 2 == 0) ? 0 : m - 1;
          out[x[0] + m * (x[1] + m * x[2])] = global.dof_ids[it->second];
        }
    }
  }
  return ids;
}

template <class T>
void chebyshev(int degree, double low, double high, const T* r, T* z, size_t n,
               const std::function<void(const T*, T*)>& apply_A, const std::function<void(const T*, T*)>& apply_P) {
  if (degree < 1) throw ContractError("chebyshev: degree must be >= 1");
  if (!(low > 0.0 && high > low)) throw ContractError("chebyshev: invalid eigenvalue bounds");
  const T theta = static_cast<T>(0.5 * (high + low));
  const T delta = static_cast<T>(0.5 * (high - low));
  const T sigma = theta / delta;
  T rho = 1 / sigma;
  std::vector<T> d(n), res(n), pres(n);
  apply_P(r, d.data());
  for (size_t i = 0; i < n; ++i) {
    d[i] /= theta;
    z[i] = d[i];
  }
  for (int k = 1; k < degree; ++k) {
    apply_A(z, res.data());
    for (size_t i = 0; i < n; ++i) res[i] = r[i] - res[i];
    apply_P(res.data(), pres.data());
    const T rho_new = 1 / (2 * sigma - rho);
    for (size_t i = 0; i < n; ++i) {
      d[i] = rho_new * rho * d[i] + 2 * rho_new / delta * pres[i];
      z[i] += d[i];
    }
    rho = rho_new;
  }
}

template void chebyshev<double>(int, double, double, const double*, double*, size_t,
                                const std::function<void(const double*, double*)>&,
                                const std::function<void(const double*, double*)>&);
template void chebyshev<float>(int, double, double, const float*, float*, size_t,
                               const std::function<void(const float*, float*)>&,
                               const std::function<void(const float*, float*)>&);

Smoother::Smoother(Space& space, const Mesh& global, std::span<const std::int64_t> elements,
                   const SmootherConfig& cfg, FieldKind kind)
    : space_(&space), cfg_(cfg), kind_(kind) {
  if (cfg.cheby_degree < 1) throw ContractError("smoother: cheby_degree must be >= 1");
  if (!(cfg.fraction_low > 0.0 && cfg.fraction_low < cfg.fraction_high))
    throw ContractError("smoother: eigenvalue fractions must satisfy 0 < low < high");
  const auto d = space.diagonal(1.0, 0.0, kind);
  inv_diag_.resize(d.size());
  for (size_t i = 0; i < d.size(); ++i) inv_diag_[i] = 1.0 / d[i];
  inv_diag_f_.assign(inv_diag_.begin(), inv_diag_.end());
  if (uses_schwarz()) {
    const Mesh& mesh = space.mesh();
    m_ = mesh.order + 3;
    const size_t m3 = static_cast<size_t>(m_) * m_ * m_;
    const auto ids = extended_ids(global, elements);
    std::vector<std::int64_t> keys(ids.size());
    for (std::int64_t e = 0; e < mesh.num_elements; ++e)
      for (size_t q = 0; q < m3; ++q) keys[e * m3 + q] = mesh.element_index[e] * static_cast<std::int64_t>(m3) + q;
    ext_gs_ = gs_setup(space.comm(), ids, keys, static_cast<int>(m3), space.comm().size());
    fdm_ = FdmSolver(mesh, space.basis(), kind);
    std::vector<double> cnt(ids.size());
    for (size_t i = 0; i < ids.size(); ++i) cnt[i] = ids[i] != 0 ? 1.0 : 0.0;
    gs_op<double>(ext_gs_, space.comm(), cnt, GsOp::add);
    const int n1 = mesh.order + 1, npe = mesh.points_per_element();
    inv_count_.resize(mesh.num_points());
    for (std::int64_t e = 0; e < mesh.num_elements; ++e)
      for (int k = 0; k < n1; ++k)
        for (int j = 0; j < n1; ++j)
          for (int i = 0; i < n1; ++i)
            inv_count_[e * npe + i + n1 * (j + n1 * k)] =
                1.0 / cnt[e * m3 + (i + 1) + m_ * ((j + 1) + m_ * (k + 1))];
    std::vector<double> owner(mesh.num_points());
    for (std::int64_t e = 0; e < mesh.num_elements; ++e)
      std::fill_n(owner.begin() + e * npe, npe, static_cast<double>(mesh.element_index[e]));
    space.gs<double>(owner, GsOp::min);
    owner_.resize(owner.size());
    for (std::int64_t e = 0; e < mesh.num_elements; ++e)
      for (int q = 0; q < npe; ++q)
        owner_[e * npe + q] = owner[e * npe + q] == static_cast<double>(mesh.element_index[e]) ? 1.0 : 0.0;
    inv_count_f_.assign(inv_count_.begin(), inv_count_.end());
    owner_f_.assign(owner_.begin(), owner_.end());
    ext_d_.resize(ids.size());
    ext_u_d_.resize(ids.size());
    ext_f_.resize(ids.size());
    ext_u_f_.resize(ids.size());
  }
  if (uses_chebyshev()) lambda_max_ = estimate_lambda_max();
}

bool Smoother::uses_schwarz() const {
  return cfg_.kind == SmootherKind::asm_ || cfg_.kind == SmootherKind::ras || cfg_.kind == SmootherKind::cheby_asm ||
         cfg_.kind == SmootherKind::cheby_ras;
}

bool Smoother::uses_chebyshev() const {
  return cfg_.kind == SmootherKind::cheby_jac || cfg_.kind == SmootherKind::cheby_asm ||
         cfg_.kind == SmootherKind::cheby_ras;
}

template <class T>
void Smoother::mask(T* v) const {
  const size_t n = space_->size();
  if constexpr (std::is_same_v<T, float>) {
    const auto& mk = space_->mask_f(kind_);
    for (size_t i = 0; i < n; ++i) v[i] *= mk[i];
  } else {
    const auto mk = space_->mesh().mask_of(kind_);
    for (size_t i = 0; i < n; ++i) v[i] *= mk[i];
  }
}

template <class T>
void Smoother::apply_A(const T* u, T* w) {
  KernelCounters* c = space_->counters() ? &space_->counters()->stiffness : nullptr;
  if constexpr (std::is_same_v<T, float>)
    stiffness_kernel<float>(space_->geom_f(), u, w, {}, c);
  else
    stiffness_kernel<double>(space_->geom(), u, w, {}, c);
  space_->assemble<T>(std::span<T>(w, space_->size()));
  mask(w);
}

template <class T>
void Smoother::schwarz(const T* r, T* z) {
  const Mesh& mesh = space_->mesh();
  const int n1 = mesh.order + 1, npe = mesh.points_per_element();
  const size_t m3 = static_cast<size_t>(m_) * m_ * m_;
  const T* inv_mult;
  const T* inv_count;
  const T* owner;
  std::vector<T>* ext_p;
  std::vector<T>* eu_p;
  if constexpr (std::is_same_v<T, float>) {
    ext_p = &ext_f_;
    eu_p = &ext_u_f_;
    inv_mult = space_->inv_mult_f().data();
    inv_count = inv_count_f_.data();
    owner = owner_f_.data();
  } else {
    ext_p = &ext_d_;
    eu_p = &ext_u_d_;
    inv_mult = space_->inv_mult().data();
    inv_count = inv_count_.data();
    owner = owner_.data();
  }
  std::vector<T>& ext = *ext_p;
  std::vector<T>& eu = *eu_p;
  auto own = [&](std::int64_t e, int i, int j, int k) {
    return e * m3 + (i + 1) + m_ * ((j + 1) + static_cast<size_t>(m_) * (k + 1));
  };
  std::fill(ext.begin(), ext.end(), T(0));
  for (std::int64_t e = 0; e < mesh.num_elements; ++e)
    for (int k = 0; k < n1; ++k)
      for (int j = 0; j < n1; ++j)
        for (int i = 0; i < n1; ++i) {
          const size_t q = e * npe + i + n1 * (j + n1 * k);
          ext[own(e, i, j, k)] = r[q] * inv_mult[q];
        }
  {
    TimerScope ts(space_->timers(), TimerCat::gather_scatter);
    gs_op<T>(ext_gs_, space_->comm(), ext, GsOp::add);
  }
  {
    TimerScope ts(space_->timers(), TimerCat::fdm);
    fdm_.solve<T>(ext.data(), eu.data(), space_->counters() ? &space_->counters()->fdm : nullptr);
  }
  const bool additive = cfg_.kind == SmootherKind::asm_ || cfg_.kind == SmootherKind::cheby_asm;
  if (additive) {
    {
      TimerScope ts(space_->timers(), TimerCat::gather_scatter);
      gs_op<T>(ext_gs_, space_->comm(), eu, GsOp::add);
    }
    for (std::int64_t e = 0; e < mesh.num_elements; ++e)
      for (int k = 0; k < n1; ++k)
        for (int j = 0; j < n1; ++j)
          for (int i = 0; i < n1; ++i) {
            const size_t q = e * npe + i + n1 * (j + n1 * k);
            z[q] = eu[own(e, i, j, k)] * inv_count[q];
          }
  } else {
    for (std::int64_t e = 0; e < mesh.num_elements; ++e)
      for (int k = 0; k < n1; ++k)
        for (int j = 0; j < n1; ++j)
          for (int i = 0; i < n1; ++i) {
            const size_t q = e * npe + i + n1 * (j + n1 * k);
            z[q] = eu[own(e, i, j, k)] * owner[q];
          }
    space_->assemble<T>(std::span<T>(z, space_->size()));
  }
  mask(z);
}

template <class T>
void Smoother::inner(const T* r, T* z) {
  if (uses_schwarz()) {
    schwarz(r, z);
    return;
  }
  const size_t n = space_->size();
  if constexpr (std::is_same_v<T, float>)
    for (size_t i = 0; i < n; ++i) z[i] = r[i] * inv_diag_f_[i];
  else
    for (size_t i = 0; i < n; ++i) z[i] = r[i] * inv_diag_[i];
  mask(z);
}

template <class T>
void Smoother::smooth(const T* r, T* z) {
  const size_t n = space_->size();
  if (uses_chebyshev()) {
    chebyshev<T>(
        cfg_.cheby_degree, cfg_.fraction_low * lambda_max_, cfg_.fraction_high * lambda_max_, r, z, n,
        [this](const T* u, T* w) { apply_A<T>(u, w); }, [this](const T* u, T* w) { inner<T>(u, w); });
  } else {
    inner<T>(r, z);
    if (cfg_.kind == SmootherKind::jacobi)
      for (size_t i = 0; i < n; ++i) z[i] *= static_cast<T>(cfg_.jacobi_weight);
  }
  mask(z);
}

void Smoother::apply(std::span<const double> r, std::span<double> z) {
  const size_t n = space_->size();
  if (r.size() != n || z.size() != n) throw ContractError("smoother: field length mismatch");
  if (cfg_.single_precision) {
    std::vector<float> rf(r.begin(), r.end()), zf(n);
    smooth<float>(rf.data(), zf.data());
    std::copy(zf.begin(), zf.end(), z.begin());
  } else {
    smooth<double>(r.data(), z.data());
  }
}

double Smoother::estimate_lambda_max() {
  const size_t n = space_->size();
  const Mesh& mesh = space_->mesh();
  const bool neumann = space_->pure_neumann(kind_);
  std::vector<double> v(n), w(n), z(n);
  for (size_t i = 0; i < n; ++i) v[i] = std::cos(static_cast<double>(mesh.dof_ids[i]));
  mask(v.data());
  if (neumann) space_->project_mean(v);
  double nv = space_->norm(v);
  if (!(nv > 0.0)) throw ContractError("smoother: power iteration start vector vanishes");
  for (auto& x : v) x /= nv;
  double lam = 0.0;
  for (int it = 0; it < cfg_.power_iters; ++it) {
    apply_A<double>(v.data(), w.data());
    inner<double>(w.data(), z.data());
    if (neumann) space_->project_mean(z);
    const double nz = space_->norm(z);
    lam = nz;
    if (!(nz > 0.0)) break;
    for (size_t i = 0; i < n; ++i) v[i] = z[i] / nz;
  }
  if (!(lam > 0.0)) throw ContractError("smoother: eigenvalue estimate is not positive");
  return lam;
}

template void Smoother::inner<double>(const double*, double*);
template void Smoother::inner<float>(const float*, float*);
template void Smoother::apply_A<double>(const double*, double*);
template void Smoother::apply_A<float>(const float*, float*);

}  // namespace nekmini
