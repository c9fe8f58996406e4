#include <algorithm>
#include <cmath>
#include <map>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "nekmini/error.hpp"
#include "nekmini/mesh.hpp"

namespace nekmini {

namespace {

const char* kind_name(int k) { return k == 0 ? "velocity" : "pressure"; }

std::string next_line(std::istream& in, int& lineno) {
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    return line.substr(b);
  }
  throw FormatError("unexpected end of mesh file after line " + std::to_string(lineno));
}

}  // namespace

void write_mesh_text(std::ostream& out, const Mesh& m) {
  const int npe = m.points_per_element();
  out << "HEXMESH v1 " << m.num_elements << ' ' << m.order << '\n';
  out << std::setprecision(17);
  for (size_t q = 0; q < m.num_points(); ++q) out << m.x[q] << ' ' << m.y[q] << ' ' << m.z[q] << '\n';
  out << "IDS\n";
  for (std::int64_t e = 0; e < m.num_elements; ++e) {
    for (int q = 0; q < npe; ++q) out << (q ? " " : "") << m.global_ids[static_cast<size_t>(e) * npe + q];
    out << '\n';
  }
  for (int k = 0; k < 2; ++k) {
    out << "MASK " << kind_name(k) << '\n';
    for (std::int64_t e = 0; e < m.num_elements; ++e) {
      for (int q = 0; q < npe; ++q)
        out << (q ? " " : "") << (m.mask[k][static_cast<size_t>(e) * npe + q] != 0.0 ? 1 : 0);
      out << '\n';
    }
  }
}

Mesh read_mesh_text(std::istream& in) {
  int lineno = 0;
  std::istringstream header(next_line(in, lineno));
  std::string magic, version;
  Mesh m;
  if (!(header >> magic >> version >> m.num_elements >> m.order) || magic != "HEXMESH" || version != "v1")
    throw FormatError("line " + std::to_string(lineno) + ": expected 'HEXMESH v1 E N'");
  if (m.order < 1 || m.num_elements < 1) throw FormatError("mesh header has invalid E or N");
  const size_t np = m.num_points();
  m.x.resize(np);
  m.y.resize(np);
  m.z.resize(np);
  for (size_t q = 0; q < np; ++q) {
    std::istringstream ls(next_line(in, lineno));
    if (!(ls >> m.x[q] >> m.y[q] >> m.z[q]))
      throw FormatError("line " + std::to_string(lineno) + ": expected 'x y z'");
  }
  std::vector<std::int64_t> file_ids;
  std::string tag = next_line(in, lineno);
  if (tag.rfind("IDS", 0) != 0) throw FormatError("line " + std::to_string(lineno) + ": expected IDS");
  file_ids.reserve(np);
  while (file_ids.size() < np) {
    std::istringstream ls(next_line(in, lineno));
    std::int64_t v;
    while (ls >> v) file_ids.push_back(v);
  }
  if (file_ids.size() != np) throw FormatError("IDS section has the wrong number of entries");

  m.element_index.resize(m.num_elements);
  for (std::int64_t e = 0; e < m.num_elements; ++e) m.element_index[e] = e;
  m.rank_of_element.assign(m.num_elements, 0);
  for (auto& df : m.dirichlet_face) df.assign(static_cast<size_t>(m.num_elements) * kFaces, 0);

  std::array<bool, 2> have_mask{false, false};
  for (int sec = 0; sec < 2; ++sec) {
    std::string line;
    try {
      line = next_line(in, lineno);
    } catch (const FormatError&) {
      break;
    }
    std::istringstream ls(line);
    std::string word, kind;
    ls >> word >> kind;
    if (word != "MASK" || (kind != "velocity" && kind != "pressure"))
      throw FormatError("line " + std::to_string(lineno) + ": expected 'MASK velocity|pressure'");
    const int k = kind == "velocity" ? 0 : 1;
    auto& mk = m.mask[k];
    mk.clear();
    mk.reserve(np);
    while (mk.size() < np) {
      std::istringstream vs(next_line(in, lineno));
      int v;
      while (vs >> v) mk.push_back(v != 0 ? 1.0 : 0.0);
    }
    if (mk.size() != np) throw FormatError("MASK section has the wrong number of entries");
    have_mask[k] = true;
  }
  for (int k = 0; k < 2; ++k)
    if (!have_mask[k]) m.mask[k].assign(np, 1.0);

  compute_geometry(m, make_basis(m.order));
  // Shared points are matched from the file's ids when present, otherwise by coordinates.
  bool any_ids = false;
  for (auto v : file_ids) any_ids = any_ids || v != 0;
  assign_global_ids(m);
  if (any_ids) {
    m.global_ids = file_ids;
    // Number distinct points by their smallest member, as the box builder does.
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
    const double tol = 1e-10 * std::max(diam, 1e-300);
    std::map<std::int64_t, std::array<std::int64_t, 3>> group_key;
    auto key = [&](size_t q) {
      return std::array<std::int64_t, 3>{std::llround(m.x[q] / tol), std::llround(m.y[q] / tol),
                                         std::llround(m.z[q] / tol)};
    };
    for (size_t q = 0; q < np; ++q) {
      if (file_ids[q] == 0) continue;
      const auto k = key(q);
      auto [it, fresh] = group_key.emplace(file_ids[q], k);
      if (!fresh && k < it->second) it->second = k;
    }
    // (key, group) per distinct point; singletons use -(q+1) as group.
    std::vector<std::pair<std::array<std::int64_t, 3>, std::int64_t>> order;
    for (const auto& [id, k] : group_key) order.emplace_back(k, id);
    for (size_t q = 0; q < np; ++q)
      if (file_ids[q] == 0) order.emplace_back(key(q), -static_cast<std::int64_t>(q) - 1);
    std::sort(order.begin(), order.end());
    std::map<std::int64_t, std::int64_t> dof_of;
    for (size_t a = 0; a < order.size(); ++a) dof_of[order[a].second] = static_cast<std::int64_t>(a) + 1;
    for (size_t q = 0; q < np; ++q)
      m.dof_ids[q] = dof_of[file_ids[q] != 0 ? file_ids[q] : -static_cast<std::int64_t>(q) - 1];
    m.num_dofs = static_cast<std::int64_t>(order.size());
  }
  find_face_neighbors(m);
  return m;
}

}  // namespace nekmini
