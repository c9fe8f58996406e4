#include "nekmini/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <unordered_map>

#include "nekmini/error.hpp"
#include "nekmini/tensor.hpp"

namespace nekmini {

namespace {

// Lexicographic index of (i,j,k) in an element of order n.
inline int lex(int i, int j, int k, int n1) { return i + n1 * (j + n1 * k); }

// Local node indices lying on face f, ordered by the two in-face indices.
std::vector<int> face_nodes(int f, int order) {
  const int n1 = order + 1;
  std::vector<int> out;
  out.reserve(static_cast<size_t>(n1) * n1);
  const int fixed = (f % 2 == 0) ? 0 : order;
  for (int b = 0; b < n1; ++b)
    for (int a = 0; a < n1; ++a) {
      switch (f / 2) {
        case 0: out.push_back(lex(fixed, a, b, n1)); break;
        case 1: out.push_back(lex(a, fixed, b, n1)); break;
        default: out.push_back(lex(a, b, fixed, n1)); break;
      }
    }
  return out;
}

struct CellKey {
  std::int64_t a, b, c;
  bool operator==(const CellKey&) const = default;
};

struct CellHash {
  size_t operator()(const CellKey& k) const {
    size_t h = static_cast<size_t>(k.a) * 0x9E3779B97F4A7C15ull;
    h ^= static_cast<size_t>(k.b) + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    h ^= static_cast<size_t>(k.c) + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    return h;
  }
};

}  // namespace

Mesh build_box_mesh(const BoxSpec& spec) {
  if (spec.order < 1) throw InvalidOrderError("mesh order must be >= 1");
  for (int d = 0; d < 3; ++d) {
    if (spec.counts[d] < 1) throw ContractError("element counts must be >= 1");
    if (!(spec.extent[d] > 0.0)) throw ContractError("box extent must be positive");
    const bool lo = spec.bc[2 * d] == BoundaryKind::periodic;
    const bool hi = spec.bc[2 * d + 1] == BoundaryKind::periodic;
    if (lo != hi) throw ContractError("periodic faces must come in pairs");
  }

  const SpectralBasis basis = make_basis(spec.order);
  const int n1 = spec.order + 1;
  const int npe = n1 * n1 * n1;
  const auto [cx, cy, cz] = spec.counts;

  Mesh m;
  m.order = spec.order;
  m.num_elements = static_cast<std::int64_t>(cx) * cy * cz;
  m.domain_origin = spec.origin;
  m.domain_extent = spec.extent;
  for (int d = 0; d < 3; ++d) m.periodic[d] = spec.bc[2 * d] == BoundaryKind::periodic;

  const size_t np = m.num_points();
  m.x.resize(np);
  m.y.resize(np);
  m.z.resize(np);
  m.element_index.resize(m.num_elements);
  m.rank_of_element.assign(m.num_elements, 0);
  for (auto& df : m.dirichlet_face) df.assign(static_cast<size_t>(m.num_elements) * kFaces, 0);

  const double hx = spec.extent[0] / cx, hy = spec.extent[1] / cy, hz = spec.extent[2] / cz;
  for (int ez = 0; ez < cz; ++ez)
    for (int ey = 0; ey < cy; ++ey)
      for (int ex = 0; ex < cx; ++ex) {
        const std::int64_t e = ex + static_cast<std::int64_t>(cx) * (ey + static_cast<std::int64_t>(cy) * ez);
        m.element_index[e] = e;
        const size_t off = static_cast<size_t>(e) * npe;
        for (int k = 0; k < n1; ++k)
          for (int j = 0; j < n1; ++j)
            for (int i = 0; i < n1; ++i) {
              Point3 p{spec.origin[0] + (ex + 0.5 * (basis.nodes[i] + 1.0)) * hx,
                       spec.origin[1] + (ey + 0.5 * (basis.nodes[j] + 1.0)) * hy,
                       spec.origin[2] + (ez + 0.5 * (basis.nodes[k] + 1.0)) * hz};
              if (spec.deformation) p = spec.deformation(p);
              const size_t q = off + lex(i, j, k, n1);
              m.x[q] = p[0];
              m.y[q] = p[1];
              m.z[q] = p[2];
            }
        const std::array<bool, 6> on_boundary{ex == 0, ex == cx - 1, ey == 0,
                                              ey == cy - 1, ez == 0, ez == cz - 1};
        for (int f = 0; f < kFaces; ++f) {
          if (!on_boundary[f]) continue;
          const size_t slot = static_cast<size_t>(e) * kFaces + f;
          m.dirichlet_face[0][slot] = spec.bc[f] == BoundaryKind::dirichlet;
          m.dirichlet_face[1][slot] = spec.bc[f] == BoundaryKind::outflow;
        }
      }

  compute_geometry(m, basis);
  assign_global_ids(m);
  build_masks(m);
  find_face_neighbors(m);
  return m;
}

void compute_geometry(Mesh& m, const SpectralBasis& basis) {
  if (basis.order != m.order) throw ContractError("basis order does not match mesh order");
  const int n1 = m.order + 1;
  const int npe = m.points_per_element();
  const size_t np = m.num_points();
  m.jac.assign(np, 0.0);
  m.mass.assign(np, 0.0);
  for (auto& a : m.metrics) a.assign(np, 0.0);
  for (auto& a : m.g) a.assign(np, 0.0);

  const std::vector<double> D = basis.diff.data;
  std::vector<double> dr(3 * 3 * static_cast<size_t>(npe));  // [p][q][point]
  for (std::int64_t e = 0; e < m.num_elements; ++e) {
    const size_t off = static_cast<size_t>(e) * npe;
    const double* coords[3] = {m.x.data() + off, m.y.data() + off, m.z.data() + off};
    for (int p = 0; p < 3; ++p) {
      double* xr = dr.data() + (3 * p + 0) * static_cast<size_t>(npe);
      double* xs = dr.data() + (3 * p + 1) * static_cast<size_t>(npe);
      double* xt = dr.data() + (3 * p + 2) * static_cast<size_t>(npe);
      tensor::contract_r(n1, n1, D.data(), coords[p], xr, n1 * n1);
      tensor::contract_s(n1, n1, D.data(), coords[p], xs, n1, n1);
      tensor::contract_t(n1, n1, D.data(), coords[p], xt, n1 * n1);
    }
    for (int q = 0; q < npe; ++q) {
      double a[3][3];  // a[p][q'] = dx_p / dr_q'
      for (int p = 0; p < 3; ++p)
        for (int s = 0; s < 3; ++s) a[p][s] = dr[(3 * p + s) * static_cast<size_t>(npe) + q];
      const double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                         a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                         a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
      const std::int64_t gel = m.element_index.empty() ? e : m.element_index[e];
      if (std::abs(det) < 1e-14)
        throw DegenerateElementError(gel, "degenerate element " + std::to_string(gel) +
                                              ": |J| < 1e-14");
      if (det < 0.0)
        throw InvertedElementError(gel, "inverted element " + std::to_string(gel) +
                                            ": non-positive Jacobian");
      // inverse: inv[q'][p] = d r_q' / d x_p
      double inv[3][3];
      inv[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) / det;
      inv[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / det;
      inv[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / det;
      inv[1][0] = (a[1][2] * a[2][0] - a[1][0] * a[2][2]) / det;
      inv[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / det;
      inv[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / det;
      inv[2][0] = (a[1][0] * a[2][1] - a[1][1] * a[2][0]) / det;
      inv[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) / det;
      inv[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / det;

      const int i = q % n1, j = (q / n1) % n1, k = q / (n1 * n1);
      const double rho = basis.weights[i] * basis.weights[j] * basis.weights[k];
      const size_t idx = off + q;
      m.jac[idx] = det;
      m.mass[idx] = rho * det;
      for (int s = 0; s < 3; ++s)
        for (int p = 0; p < 3; ++p) m.metrics[3 * s + p][idx] = inv[s][p];
      auto gmm = [&](int r, int s) {
        return (inv[r][0] * inv[s][0] + inv[r][1] * inv[s][1] + inv[r][2] * inv[s][2]) *
               m.mass[idx];
      };
      m.g[0][idx] = gmm(0, 0);
      m.g[1][idx] = gmm(0, 1);
      m.g[2][idx] = gmm(0, 2);
      m.g[3][idx] = gmm(1, 1);
      m.g[4][idx] = gmm(1, 2);
      m.g[5][idx] = gmm(2, 2);
    }
  }
}

void assign_global_ids(Mesh& m, double tolerance) {
  const size_t np = m.num_points();
  if (np == 0) return;
  double lo[3] = {m.x[0], m.y[0], m.z[0]}, hi[3] = {m.x[0], m.y[0], m.z[0]};
  for (size_t q = 0; q < np; ++q) {
    const double c[3] = {m.x[q], m.y[q], m.z[q]};
    for (int d = 0; d < 3; ++d) {
      lo[d] = std::min(lo[d], c[d]);
      hi[d] = std::max(hi[d], c[d]);
    }
  }
  const double diam = std::sqrt((hi[0] - lo[0]) * (hi[0] - lo[0]) + (hi[1] - lo[1]) * (hi[1] - lo[1]) +
                                (hi[2] - lo[2]) * (hi[2] - lo[2]));
  const double tol = tolerance > 0.0 ? tolerance : 1e-10 * std::max(diam, 1e-300);

  auto wrapped = [&](size_t q) {
    Point3 c{m.x[q], m.y[q], m.z[q]};
    for (int d = 0; d < 3; ++d) {
      if (!m.periodic[d]) continue;
      const double o = m.domain_origin[d], L = m.domain_extent[d];
      double v = std::fmod(c[d] - o, L);
      if (v < 0.0) v += L;
      if (v > L - tol) v -= L;
      c[d] = o + v;
    }
    return c;
  };

  std::vector<Point3> pts(np);
  for (size_t q = 0; q < np; ++q) pts[q] = wrapped(q);

  std::unordered_map<CellKey, std::vector<std::int64_t>, CellHash> cells;
  std::vector<std::int64_t> cluster_of(np, -1);
  std::vector<Point3> rep;       // representative point per cluster
  std::vector<Point3> min_pt;    // lexicographically smallest member
  std::vector<std::int64_t> count;

  auto cell_of = [&](const Point3& p) {
    return CellKey{static_cast<std::int64_t>(std::floor(p[0] / tol)),
                   static_cast<std::int64_t>(std::floor(p[1] / tol)),
                   static_cast<std::int64_t>(std::floor(p[2] / tol))};
  };

  for (size_t q = 0; q < np; ++q) {
    const Point3& p = pts[q];
    const CellKey ck = cell_of(p);
    std::int64_t found = -1;
    for (int da = -1; da <= 1; ++da)
      for (int db = -1; db <= 1; ++db)
        for (int dc = -1; dc <= 1; ++dc) {
          auto it = cells.find(CellKey{ck.a + da, ck.b + db, ck.c + dc});
          if (it == cells.end()) continue;
          for (std::int64_t cl : it->second) {
            const Point3& r = rep[cl];
            if (std::abs(r[0] - p[0]) <= tol && std::abs(r[1] - p[1]) <= tol &&
                std::abs(r[2] - p[2]) <= tol) {
              if (found >= 0 && found != cl)
                throw AmbiguousIdError("point " + std::to_string(q) +
                                       " matches two distinct coordinate clusters");
              found = cl;
            }
          }
        }
    if (found < 0) {
      found = static_cast<std::int64_t>(rep.size());
      rep.push_back(p);
      min_pt.push_back(p);
      count.push_back(0);
      cells[ck].push_back(found);
    } else if (p < min_pt[found]) {
      min_pt[found] = p;
    }
    cluster_of[q] = found;
    ++count[found];
  }

  const size_t nc = rep.size();
  std::vector<std::int64_t> order(nc);
  for (size_t c = 0; c < nc; ++c) order[c] = static_cast<std::int64_t>(c);
  auto key = [&](std::int64_t c) {
    return std::array<std::int64_t, 3>{std::llround(min_pt[c][0] / tol),
                                       std::llround(min_pt[c][1] / tol),
                                       std::llround(min_pt[c][2] / tol)};
  };
  std::vector<std::array<std::int64_t, 3>> keys(nc);
  for (size_t c = 0; c < nc; ++c) keys[c] = key(static_cast<std::int64_t>(c));
  std::sort(order.begin(), order.end(), [&](std::int64_t a, std::int64_t b) { return keys[a] < keys[b]; });

  std::vector<std::int64_t> dof_of_cluster(nc), gid_of_cluster(nc, 0);
  std::int64_t next_gid = 0;
  for (size_t r = 0; r < nc; ++r) {
    const std::int64_t c = order[r];
    dof_of_cluster[c] = static_cast<std::int64_t>(r) + 1;
    if (count[c] > 1) gid_of_cluster[c] = ++next_gid;
  }
  m.dof_ids.resize(np);
  m.global_ids.resize(np);
  for (size_t q = 0; q < np; ++q) {
    m.dof_ids[q] = dof_of_cluster[cluster_of[q]];
    m.global_ids[q] = gid_of_cluster[cluster_of[q]];
  }
  m.num_dofs = static_cast<std::int64_t>(nc);
}

void build_masks(Mesh& m) {
  const int npe = m.points_per_element();
  const size_t np = m.num_points();
  std::vector<std::vector<int>> faces(kFaces);
  for (int f = 0; f < kFaces; ++f) faces[f] = face_nodes(f, m.order);
  for (int kind = 0; kind < 2; ++kind) {
    auto& mk = m.mask[kind];
    mk.assign(np, 1.0);
    if (m.dirichlet_face[kind].empty()) continue;
    for (std::int64_t e = 0; e < m.num_elements; ++e)
      for (int f = 0; f < kFaces; ++f)
        if (m.dirichlet_face[kind][static_cast<size_t>(e) * kFaces + f])
          for (int q : faces[f]) mk[static_cast<size_t>(e) * npe + q] = 0.0;
    // A point is Dirichlet if any copy of it is.
    std::vector<double> by_dof(static_cast<size_t>(m.num_dofs) + 1, 1.0);
    for (size_t q = 0; q < np; ++q) by_dof[m.dof_ids[q]] = std::min(by_dof[m.dof_ids[q]], mk[q]);
    for (size_t q = 0; q < np; ++q) mk[q] = by_dof[m.dof_ids[q]];
  }
}

void find_face_neighbors(Mesh& m) {
  const int npe = m.points_per_element();
  m.neighbors.assign(static_cast<size_t>(m.num_elements) * kFaces, FaceNeighbor{});
  std::vector<std::vector<int>> faces(kFaces);
  for (int f = 0; f < kFaces; ++f) faces[f] = face_nodes(f, m.order);
  std::map<std::vector<std::int64_t>, std::vector<std::pair<std::int64_t, int>>> by_key;
  for (std::int64_t e = 0; e < m.num_elements; ++e)
    for (int f = 0; f < kFaces; ++f) {
      std::vector<std::int64_t> key;
      key.reserve(faces[f].size());
      for (int q : faces[f]) key.push_back(m.dof_ids[static_cast<size_t>(e) * npe + q]);
      std::sort(key.begin(), key.end());
      by_key[std::move(key)].emplace_back(e, f);
    }
  for (const auto& [key, list] : by_key) {
    if (list.size() != 2) continue;
    const auto [e0, f0] = list[0];
    const auto [e1, f1] = list[1];
    m.neighbors[static_cast<size_t>(e0) * kFaces + f0] = {m.element_index[e1], f1};
    m.neighbors[static_cast<size_t>(e1) * kFaces + f1] = {m.element_index[e0], f0};
  }
}

Mesh remesh_order(const Mesh& fine, int order) {
  const SpectralBasis fb = make_basis(fine.order);
  const SpectralBasis cb = make_basis(order);
  const InterpMatrix J = interp_matrix(fb, cb.nodes);
  const int n1f = fine.order + 1, n1c = order + 1;
  const int npf = fine.points_per_element(), npc = n1c * n1c * n1c;

  Mesh m;
  m.order = order;
  m.num_elements = fine.num_elements;
  m.domain_origin = fine.domain_origin;
  m.domain_extent = fine.domain_extent;
  m.periodic = fine.periodic;
  m.element_index = fine.element_index;
  m.rank_of_element = fine.rank_of_element;
  m.dirichlet_face = fine.dirichlet_face;
  const size_t np = m.num_points();
  m.x.resize(np);
  m.y.resize(np);
  m.z.resize(np);
  std::vector<double> work(2 * static_cast<size_t>(std::max(n1f, n1c)) * std::max(n1f, n1c) *
                           std::max(n1f, n1c));
  for (std::int64_t e = 0; e < m.num_elements; ++e) {
    const size_t fo = static_cast<size_t>(e) * npf, co = static_cast<size_t>(e) * npc;
    const double* M = J.values.data.data();
    tensor::apply3(n1c, n1f, M, M, M, fine.x.data() + fo, m.x.data() + co, work.data());
    tensor::apply3(n1c, n1f, M, M, M, fine.y.data() + fo, m.y.data() + co, work.data());
    tensor::apply3(n1c, n1f, M, M, M, fine.z.data() + fo, m.z.data() + co, work.data());
  }
  compute_geometry(m, cb);
  assign_global_ids(m);
  build_masks(m);
  m.neighbors = fine.neighbors;
  return m;
}

Mesh extract_elements(const Mesh& src, std::span<const std::int64_t> elements) {
  Mesh m;
  m.order = src.order;
  m.num_elements = static_cast<std::int64_t>(elements.size());
  m.domain_origin = src.domain_origin;
  m.domain_extent = src.domain_extent;
  m.periodic = src.periodic;
  m.num_dofs = src.num_dofs;
  const int npe = src.points_per_element();
  auto copy_pts = [&](const std::vector<double>& from, std::vector<double>& to) {
    if (from.empty()) return;
    to.resize(m.num_points());
    for (size_t a = 0; a < elements.size(); ++a)
      std::copy_n(from.begin() + static_cast<std::ptrdiff_t>(elements[a] * npe), npe,
                  to.begin() + static_cast<std::ptrdiff_t>(a * npe));
  };
  auto copy_ids = [&](const std::vector<std::int64_t>& from, std::vector<std::int64_t>& to) {
    if (from.empty()) return;
    to.resize(m.num_points());
    for (size_t a = 0; a < elements.size(); ++a)
      std::copy_n(from.begin() + static_cast<std::ptrdiff_t>(elements[a] * npe), npe,
                  to.begin() + static_cast<std::ptrdiff_t>(a * npe));
  };
  copy_pts(src.x, m.x);
  copy_pts(src.y, m.y);
  copy_pts(src.z, m.z);
  copy_pts(src.jac, m.jac);
  copy_pts(src.mass, m.mass);
  for (int c = 0; c < 9; ++c) copy_pts(src.metrics[c], m.metrics[c]);
  for (int c = 0; c < 6; ++c) copy_pts(src.g[c], m.g[c]);
  for (int k = 0; k < 2; ++k) copy_pts(src.mask[k], m.mask[k]);
  copy_ids(src.global_ids, m.global_ids);
  copy_ids(src.dof_ids, m.dof_ids);
  m.element_index.resize(elements.size());
  m.rank_of_element.resize(elements.size());
  for (int k = 0; k < 2; ++k) m.dirichlet_face[k].assign(elements.size() * kFaces, 0);
  m.neighbors.resize(elements.size() * kFaces);
  for (size_t a = 0; a < elements.size(); ++a) {
    const std::int64_t e = elements[a];
    m.element_index[a] = src.element_index.empty() ? e : src.element_index[e];
    m.rank_of_element[a] = src.rank_of_element.empty() ? 0 : src.rank_of_element[e];
    for (int f = 0; f < kFaces; ++f) {
      for (int k = 0; k < 2; ++k)
        if (!src.dirichlet_face[k].empty())
          m.dirichlet_face[k][a * kFaces + f] = src.dirichlet_face[k][e * kFaces + f];
      if (!src.neighbors.empty()) m.neighbors[a * kFaces + f] = src.neighbors[e * kFaces + f];
    }
  }
  return m;
}

std::vector<Point3> element_centroids(const Mesh& m) {
  const int npe = m.points_per_element();
  std::vector<Point3> c(m.num_elements, Point3{0, 0, 0});
  for (std::int64_t e = 0; e < m.num_elements; ++e) {
    for (int q = 0; q < npe; ++q) {
      const size_t idx = static_cast<size_t>(e) * npe + q;
      c[e][0] += m.x[idx];
      c[e][1] += m.y[idx];
      c[e][2] += m.z[idx];
    }
    for (int d = 0; d < 3; ++d) c[e][d] /= npe;
  }
  return c;
}

void apply_mask(std::span<double> field, const Mesh& mesh, FieldKind kind) {
  const auto mk = mesh.mask_of(kind);
  if (field.size() != mk.size()) throw ContractError("mask length mismatch");
  for (size_t q = 0; q < field.size(); ++q) field[q] *= mk[q];
}

}  // namespace nekmini
