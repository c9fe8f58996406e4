#include "nekmini/partition.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "nekmini/error.hpp"

namespace nekmini {

ElementGraph build_element_graph(const Mesh& mesh) {
  const int npe = mesh.points_per_element();
  ElementGraph g;
  g.centroids = element_centroids(mesh);
  g.adj.assign(mesh.num_elements, {});
  std::unordered_map<std::int64_t, std::vector<std::int64_t>> by_point;
  for (std::int64_t e = 0; e < mesh.num_elements; ++e)
    for (int q = 0; q < npe; ++q) {
      const std::int64_t id = mesh.global_ids[static_cast<size_t>(e) * npe + q];
      if (id == 0) continue;
      auto& v = by_point[id];
      if (v.empty() || v.back() != e) v.push_back(e);
    }
  for (auto& [id, els] : by_point)
    for (std::int64_t a : els)
      for (std::int64_t b : els)
        if (a != b) g.adj[a].push_back(b);
  for (auto& l : g.adj) {
    std::sort(l.begin(), l.end());
    l.erase(std::unique(l.begin(), l.end()), l.end());
  }
  return g;
}

ElementGraph graph_from_edges(std::int64_t n, std::span<const std::pair<std::int64_t, std::int64_t>> edges,
                              std::vector<Point3> centroids) {
  ElementGraph g;
  g.adj.assign(n, {});
  for (auto [a, b] : edges) {
    if (a == b) continue;
    g.adj[a].push_back(b);
    g.adj[b].push_back(a);
  }
  for (auto& l : g.adj) {
    std::sort(l.begin(), l.end());
    l.erase(std::unique(l.begin(), l.end()), l.end());
  }
  if (centroids.empty()) {
    centroids.resize(n);
    for (std::int64_t i = 0; i < n; ++i) centroids[i] = {static_cast<double>(i), 0.0, 0.0};
  }
  g.centroids = std::move(centroids);
  return g;
}

ElementGraph chain_graph(std::int64_t n) {
  std::vector<std::pair<std::int64_t, std::int64_t>> edges;
  for (std::int64_t i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return graph_from_edges(n, edges);
}

std::vector<std::int64_t> part_sizes(std::int64_t elements, int parts) {
  if (parts < 1) throw ContractError("partition: parts must be >= 1");
  std::vector<std::int64_t> s(parts, elements / parts);
  for (int p = 0; p < elements % parts; ++p) ++s[p];
  return s;
}

namespace {

struct Splitter {
  std::vector<std::int64_t> sizes;
  std::vector<int>& out;

  // Splits `set` (already sorted by the bisection coordinate) between parts
  // [first, first + count).
  std::int64_t left_count(int first, int count) const {
    std::int64_t n = 0;
    for (int p = first; p < first + count / 2; ++p) n += sizes[p];
    return n;
  }
};

void rcb_recurse(std::span<const Point3> c, std::vector<std::int64_t> set, int first, int count, Splitter& sp) {
  if (count == 1) {
    for (auto e : set) sp.out[e] = first;
    return;
  }
  Point3 lo = c[set[0]], hi = c[set[0]];
  for (auto e : set)
    for (int d = 0; d < 3; ++d) {
      lo[d] = std::min(lo[d], c[e][d]);
      hi[d] = std::max(hi[d], c[e][d]);
    }
  int axis = 0;
  for (int d = 1; d < 3; ++d)
    if (hi[d] - lo[d] > hi[axis] - lo[axis]) axis = d;
  std::sort(set.begin(), set.end(), [&](std::int64_t a, std::int64_t b) {
    return c[a][axis] != c[b][axis] ? c[a][axis] < c[b][axis] : a < b;
  });
  const std::int64_t nl = sp.left_count(first, count);
  std::vector<std::int64_t> left(set.begin(), set.begin() + nl), right(set.begin() + nl, set.end());
  rcb_recurse(c, std::move(left), first, count / 2, sp);
  rcb_recurse(c, std::move(right), first + count / 2, count - count / 2, sp);
}

// Laplacian of the subgraph induced by `verts` (local numbering).
struct SubLaplacian {
  std::vector<std::vector<int>> adj;
  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
    const int n = static_cast<int>(adj.size());
    for (int i = 0; i < n; ++i) {
      double s = static_cast<double>(adj[i].size()) * x[i];
      for (int j : adj[i]) s -= x[j];
      y[i] = s;
    }
  }
};

SubLaplacian sub_laplacian(const ElementGraph& g, std::span<const std::int64_t> verts) {
  std::unordered_map<std::int64_t, int> local;
  for (size_t i = 0; i < verts.size(); ++i) local[verts[i]] = static_cast<int>(i);
  SubLaplacian L;
  L.adj.resize(verts.size());
  for (size_t i = 0; i < verts.size(); ++i)
    for (auto nb : g.adj[verts[i]]) {
      auto it = local.find(nb);
      if (it != local.end()) L.adj[i].push_back(it->second);
    }
  return L;
}

FiedlerResult lanczos(const SubLaplacian& L, std::span<const double> start, const LanczosOptions& opt) {
  const int n = static_cast<int>(L.adj.size());
  FiedlerResult res;
  if (n == 1) {
    res.vector = {0.0};
    return res;
  }
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n) / std::sqrt(static_cast<double>(n));
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = start.empty() ? static_cast<double>(i) : start[i];
  v -= ones.dot(v) * ones;
  if (v.norm() < 1e-12) {
    for (int i = 0; i < n; ++i) v[i] = static_cast<double>(i);
    v -= ones.dot(v) * ones;
  }
  v.normalize();

  const int m = std::max(1, std::min(opt.restart, n - 1));
  Eigen::MatrixXd V(n, m + 1);
  Eigen::VectorXd w(n), y(n), Ly(n);
  double theta = 0.0;
  for (int restart = 0; restart <= opt.max_restarts; ++restart) {
    V.col(0) = v;
    std::vector<double> alpha, beta;
    int k = 0;
    for (; k < m; ++k) {
      L.apply(V.col(k), w);
      const double a = V.col(k).dot(w);
      alpha.push_back(a);
      // full reorthogonalization (twice) against ones and the basis so far
      for (int pass = 0; pass < 2; ++pass) {
        w -= ones.dot(w) * ones;
        for (int j = 0; j <= k; ++j) w -= V.col(j).dot(w) * V.col(j);
      }
      const double b = w.norm();
      if (k + 1 == m || b < 1e-14) {
        beta.push_back(b);
        ++k;
        break;
      }
      beta.push_back(b);
      V.col(k + 1) = w / b;
    }
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
      T(i, i) = alpha[i];
      if (i + 1 < k) T(i, i + 1) = T(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    theta = es.eigenvalues()[0];
    y = V.leftCols(k) * es.eigenvectors().col(0);
    y -= ones.dot(y) * ones;
    y.normalize();
    L.apply(y, Ly);
    theta = y.dot(Ly);
    res.residual = (Ly - theta * y).norm();
    res.restarts = restart;
    if (res.residual <= opt.tol) break;
    v = y;
  }
  if (y[0] > 0) y = -y;
  res.vector.assign(y.data(), y.data() + n);
  res.eigenvalue = theta;
  return res;
}

struct RsbContext {
  const ElementGraph& g;
  const Partition* seed;
  const LanczosOptions& opt;
  Splitter sp;
};

void rsb_recurse(RsbContext& ctx, std::vector<std::int64_t> set, int first, int count) {
  if (count == 1) {
    for (auto e : set) ctx.sp.out[e] = first;
    return;
  }
  std::sort(set.begin(), set.end());
  // Ordering key per vertex of the subset; components are laid out one after another.
  std::vector<std::pair<double, std::int64_t>> order;
  auto comps = connected_components(ctx.g, set);
  double offset = 0.0;
  for (auto& comp : comps) {
    std::vector<double> start;
    if (ctx.seed)
      for (auto e : comp) start.push_back(static_cast<double>(ctx.seed->rank_of_element[e]) + 1e-3 * static_cast<double>(e) / static_cast<double>(ctx.g.size()));
    const SubLaplacian L = sub_laplacian(ctx.g, comp);
    const FiedlerResult f = lanczos(L, start, ctx.opt);
    double lo = 0.0, hi = 0.0;
    for (double x : f.vector) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    for (size_t i = 0; i < comp.size(); ++i) order.emplace_back(offset + (f.vector[i] - lo), comp[i]);
    offset += (hi - lo) + 1.0;
  }
  std::sort(order.begin(), order.end());
  const std::int64_t nl = ctx.sp.left_count(first, count);
  std::vector<std::int64_t> left, right;
  for (size_t i = 0; i < order.size(); ++i)
    (static_cast<std::int64_t>(i) < nl ? left : right).push_back(order[i].second);
  rsb_recurse(ctx, std::move(left), first, count / 2);
  rsb_recurse(ctx, std::move(right), first + count / 2, count - count / 2);
}

}  // namespace

Partition rcb(std::span<const Point3> centroids, int parts) {
  Partition p;
  p.parts = parts;
  p.rank_of_element.assign(centroids.size(), 0);
  Splitter sp{part_sizes(static_cast<std::int64_t>(centroids.size()), parts), p.rank_of_element};
  std::vector<std::int64_t> all(centroids.size());
  std::iota(all.begin(), all.end(), 0);
  if (!all.empty()) rcb_recurse(centroids, std::move(all), 0, parts, sp);
  return p;
}

FiedlerResult fiedler_lanczos(const ElementGraph& graph, std::span<const double> start, const LanczosOptions& opt) {
  std::vector<std::int64_t> all(graph.size());
  std::iota(all.begin(), all.end(), 0);
  if (connected_components(graph, all).size() > 1)
    throw ContractError("fiedler_lanczos: graph is not connected");
  if (!start.empty() && static_cast<std::int64_t>(start.size()) != graph.size())
    throw ContractError("fiedler_lanczos: start vector length mismatch");
  return lanczos(sub_laplacian(graph, all), start, opt);
}

Partition rsb(const ElementGraph& graph, int parts, const Partition* seed, const LanczosOptions& opt) {
  Partition p;
  p.parts = parts;
  p.rank_of_element.assign(graph.size(), 0);
  RsbContext ctx{graph, seed, opt, Splitter{part_sizes(graph.size(), parts), p.rank_of_element}};
  std::vector<std::int64_t> all(graph.size());
  std::iota(all.begin(), all.end(), 0);
  if (!all.empty()) rsb_recurse(ctx, std::move(all), 0, parts);
  return p;
}

PartitionQuality partition_quality(const ElementGraph& graph, const Partition& p) {
  PartitionQuality q;
  std::vector<std::vector<int>> nb(p.parts);
  std::vector<std::int64_t> size(p.parts, 0);
  for (std::int64_t e = 0; e < graph.size(); ++e) {
    const int a = p.rank_of_element[e];
    ++size[a];
    for (auto f : graph.adj[e]) {
      const int b = p.rank_of_element[f];
      if (a == b) continue;
      if (e < f) ++q.edge_cut;
      nb[a].push_back(b);
    }
  }
  for (auto& v : nb) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    q.neighbors.push_back(static_cast<int>(v.size()));
    q.max_neighbors = std::max(q.max_neighbors, q.neighbors.back());
  }
  q.min_size = *std::min_element(size.begin(), size.end());
  q.max_size = *std::max_element(size.begin(), size.end());
  return q;
}

std::vector<std::vector<std::int64_t>> connected_components(const ElementGraph& graph,
                                                            std::span<const std::int64_t> vertices) {
  std::unordered_map<std::int64_t, int> seen;
  for (auto v : vertices) seen[v] = -1;
  std::vector<std::int64_t> sorted(vertices.begin(), vertices.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::vector<std::int64_t>> comps;
  for (auto s : sorted) {
    if (seen[s] >= 0) continue;
    const int id = static_cast<int>(comps.size());
    comps.emplace_back();
    std::vector<std::int64_t> stack{s};
    seen[s] = id;
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      comps[id].push_back(v);
      for (auto nb : graph.adj[v]) {
        auto it = seen.find(nb);
        if (it != seen.end() && it->second < 0) {
          it->second = id;
          stack.push_back(nb);
        }
      }
    }
    std::sort(comps[id].begin(), comps[id].end());
  }
  return comps;
}

}  // namespace nekmini
