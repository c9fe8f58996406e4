#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "nekmini/basis.hpp"

namespace nekmini {

enum class FieldKind { velocity = 0, pressure = 1 };

// Boundary treatment of one face of the box domain.
//   dirichlet: velocity prescribed, pressure Neumann (walls, inflow)
//   outflow:   velocity Neumann, pressure Dirichlet
enum class BoundaryKind { periodic, dirichlet, outflow };

using Point3 = std::array<double, 3>;
using Deformation = std::function<Point3(const Point3&)>;

struct BoxSpec {
  Point3 origin{0.0, 0.0, 0.0};
  Point3 extent{1.0, 1.0, 1.0};
  std::array<int, 3> counts{1, 1, 1};
  int order = 1;
  // Faces ordered -x, +x, -y, +y, -z, +z.
  std::array<BoundaryKind, 6> bc{BoundaryKind::dirichlet, BoundaryKind::dirichlet,
                                 BoundaryKind::dirichlet, BoundaryKind::dirichlet,
                                 BoundaryKind::dirichlet, BoundaryKind::dirichlet};
  Deformation deformation;  // empty: undeformed
};

struct FaceNeighbor {
  std::int64_t element = -1;  // global element index, -1 when on the boundary
  int face = -1;
};

// Element faces: 0: r=-1, 1: r=+1, 2: s=-1, 3: s=+1, 4: t=-1, 5: t=+1.
inline constexpr int kFaces = 6;

// Curvilinear hexahedral spectral-element mesh. All per-point arrays are
// element-major with lexicographic (i fastest) ordering inside each element.
struct Mesh {
  int order = 0;
  std::int64_t num_elements = 0;

  std::vector<double> x, y, z;

  // Geometric factors.
  std::vector<double> jac;
  std::vector<double> mass;                     // rho_ijk * J
  std::array<std::vector<double>, 9> metrics;   // [3*q + p] = d r_q / d x_p
  std::array<std::vector<double>, 6> g;         // G11 G12 G13 G22 G23 G33

  std::vector<std::int64_t> global_ids;  // shared-point pointers, 0 for singletons
  std::vector<std::int64_t> dof_ids;     // 1-based numbering of every distinct point
  std::int64_t num_dofs = 0;

  std::array<std::vector<double>, 2> mask;                  // per FieldKind
  std::array<std::vector<unsigned char>, 2> dirichlet_face;  // [kind][e*6+f]
  std::vector<std::int64_t> element_index;                  // global element number
  std::vector<int> rank_of_element;
  std::vector<FaceNeighbor> neighbors;                       // [e*6+f]

  Point3 domain_origin{0.0, 0.0, 0.0};
  Point3 domain_extent{0.0, 0.0, 0.0};
  std::array<bool, 3> periodic{false, false, false};

  int points_per_element() const { return (order + 1) * (order + 1) * (order + 1); }
  size_t num_points() const { return static_cast<size_t>(num_elements) * points_per_element(); }

  std::span<const double> mask_of(FieldKind k) const { return mask[static_cast<int>(k)]; }
};

Mesh build_box_mesh(const BoxSpec& spec);

// Jacobian, metrics, G and B from the nodal coordinates. Throws
// DegenerateElementError for |J| < 1e-14 and InvertedElementError for J < 0.
void compute_geometry(Mesh& mesh, const SpectralBasis& basis);

// Coordinate-sort id discovery. tolerance <= 0 selects 1e-10 * domain diameter.
void assign_global_ids(Mesh& mesh, double tolerance = 0.0);

// Masks from the Dirichlet face tags, made consistent over coincident points.
void build_masks(Mesh& mesh);

// Face adjacency from matching face dof sets.
void find_face_neighbors(Mesh& mesh);

// Same elements represented at a lower (or higher) polynomial order.
Mesh remesh_order(const Mesh& mesh, int order);

// Sub-mesh holding the listed elements (global numbering is preserved).
Mesh extract_elements(const Mesh& mesh, std::span<const std::int64_t> elements);

std::vector<Point3> element_centroids(const Mesh& mesh);

void apply_mask(std::span<double> field, const Mesh& mesh, FieldKind kind);

// Line-oriented text format: "HEXMESH v1 E N", coordinates, IDS, MASK sections.
void write_mesh_text(std::ostream& out, const Mesh& mesh);
Mesh read_mesh_text(std::istream& in);

}  // namespace nekmini
