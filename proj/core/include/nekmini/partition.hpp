#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nekmini/mesh.hpp"

namespace nekmini {

// Element-centered connectivity graph: elements sharing at least one gridpoint
// are adjacent (unit weights, no self loops).
struct ElementGraph {
  std::vector<Point3> centroids;
  std::vector<std::vector<std::int64_t>> adj;  // sorted neighbor lists

  std::int64_t size() const { return static_cast<std::int64_t>(adj.size()); }
};

ElementGraph build_element_graph(const Mesh& mesh);
ElementGraph graph_from_edges(std::int64_t n, std::span<const std::pair<std::int64_t, std::int64_t>> edges,
                              std::vector<Point3> centroids = {});
ElementGraph chain_graph(std::int64_t n);

struct Partition {
  int parts = 1;
  std::vector<int> rank_of_element;
};

// Target part sizes: floor(E/P), with the first E mod P parts one larger.
std::vector<std::int64_t> part_sizes(std::int64_t elements, int parts);

Partition rcb(std::span<const Point3> centroids, int parts);

struct FiedlerResult {
  std::vector<double> vector;  // unit 2-norm, orthogonal to ones
  double eigenvalue = 0.0;     // Rayleigh quotient
  double residual = 0.0;       // ||L v - lambda v||
  int restarts = 0;
};

struct LanczosOptions {
  int restart = 30;
  double tol = 1e-8;
  int max_restarts = 500;
};

// Fiedler vector of the Laplacian of a connected graph by restarted Lanczos with
// full reorthogonalization and deflation of the constant vector. The start
// vector defaults to the vertex index. Sign: first entry <= 0.
FiedlerResult fiedler_lanczos(const ElementGraph& graph, std::span<const double> start = {},
                              const LanczosOptions& opt = {});

// Recursive spectral bisection. A seed partition (for example from rcb) supplies
// the Lanczos start vectors.
Partition rsb(const ElementGraph& graph, int parts, const Partition* seed = nullptr,
              const LanczosOptions& opt = {});

struct PartitionQuality {
  std::int64_t edge_cut = 0;
  std::vector<int> neighbors;  // "ngh" per part
  int max_neighbors = 0;
  std::int64_t min_size = 0;
  std::int64_t max_size = 0;
};

PartitionQuality partition_quality(const ElementGraph& graph, const Partition& p);

// Connected components of the subgraph induced by `vertices` (each sorted, ordered
// by their lowest vertex).
std::vector<std::vector<std::int64_t>> connected_components(const ElementGraph& graph,
                                                            std::span<const std::int64_t> vertices);

}  // namespace nekmini
