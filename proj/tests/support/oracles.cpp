#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace oracle {

double lagrange(std::span<const double> nodes, int i, double r) {
  double v = 1.0;
  for (size_t j = 0; j < nodes.size(); ++j)
    if (static_cast<int>(j) != i) v *= (r - nodes[j]) / (nodes[i] - nodes[j]);
  return v;
}

double lagrange_deriv(std::span<const double> nodes, int i, double r) {
  double s = 0.0;
  for (size_t k = 0; k < nodes.size(); ++k) {
    if (static_cast<int>(k) == i) continue;
    double t = 1.0 / (nodes[i] - nodes[k]);
    for (size_t j = 0; j < nodes.size(); ++j)
      if (static_cast<int>(j) != i && j != k) t *= (r - nodes[j]) / (nodes[i] - nodes[j]);
    s += t;
  }
  return s;
}

long double legendre_ld(int n, long double x) {
  if (n == 0) return 1.0L;
  long double p0 = 1.0L, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

std::vector<double> gll_nodes(int order) {
  // Interior nodes are the roots of P'_N; Newton with P''_N from the Legendre ODE.
  const int N = order;
  std::vector<double> out(N + 1);
  out[0] = -1.0;
  out[N] = 1.0;
  for (int i = 1; i < N; ++i) {
    long double x = -std::cos(std::numbers::pi_v<long double> * i / N);
    for (int it = 0; it < 100; ++it) {
      const long double p = legendre_ld(N, x), pm = legendre_ld(N - 1, x);
      const long double dp = N * (pm - x * p) / (1 - x * x);
      // d2p from (1-x^2) p'' - 2x p' + N(N+1) p = 0
      const long double d2p = (2 * x * dp - N * (N + 1) * p) / (1 - x * x);
      const long double dx = dp / d2p;
      x -= dx;
      if (std::fabs(dx) < 1e-19L) break;
    }
    out[i] = static_cast<double>(x);
  }
  return out;
}

std::vector<double> gll_weights(int order) {
  const auto x = gll_nodes(order);
  std::vector<double> w(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    const long double p = legendre_ld(order, x[i]);
    w[i] = static_cast<double>(2.0L / (order * (order + 1) * p * p));
  }
  return w;
}

ElementOracle::ElementOracle(const nekmini::Mesh& mesh, std::int64_t e)
    : n1_(mesh.order + 1), nodes_(gll_nodes(mesh.order)) {
  const int npe = mesh.points_per_element();
  const auto off = static_cast<size_t>(e) * npe;
  x_.assign(mesh.x.begin() + off, mesh.x.begin() + off + npe);
  y_.assign(mesh.y.begin() + off, mesh.y.begin() + off + npe);
  z_.assign(mesh.z.begin() + off, mesh.z.begin() + off + npe);
}

double ElementOracle::phi(int i, const std::array<double, 3>& r) const {
  const int a = i % n1_, b = (i / n1_) % n1_, c = i / (n1_ * n1_);
  return lagrange(nodes_, a, r[0]) * lagrange(nodes_, b, r[1]) * lagrange(nodes_, c, r[2]);
}

std::array<double, 3> ElementOracle::grad_ref(int i, const std::array<double, 3>& r) const {
  const int a = i % n1_, b = (i / n1_) % n1_, c = i / (n1_ * n1_);
  const double la = lagrange(nodes_, a, r[0]), lb = lagrange(nodes_, b, r[1]), lc = lagrange(nodes_, c, r[2]);
  const double da = lagrange_deriv(nodes_, a, r[0]), db = lagrange_deriv(nodes_, b, r[1]),
               dc = lagrange_deriv(nodes_, c, r[2]);
  return {da * lb * lc, la * db * lc, la * lb * dc};
}

PointGeometry ElementOracle::geometry(const std::array<double, 3>& r) const {
  PointGeometry g;
  Eigen::Matrix3d dxdr = Eigen::Matrix3d::Zero();
  for (int i = 0; i < n3(); ++i) {
    const double p = phi(i, r);
    const auto d = grad_ref(i, r);
    const double xs[3] = {x_[i], y_[i], z_[i]};
    for (int a = 0; a < 3; ++a) {
      g.x[a] += xs[a] * p;
      for (int q = 0; q < 3; ++q) dxdr(a, q) += xs[a] * d[q];
    }
  }
  g.J = dxdr.determinant();
  const Eigen::Matrix3d inv = dxdr.inverse();
  for (int q = 0; q < 3; ++q)
    for (int p = 0; p < 3; ++p) g.rx[q][p] = inv(q, p);
  return g;
}

namespace {

struct QuadPoint {
  double w;
  PointGeometry geo;
  std::vector<double> phi;
  std::vector<std::array<double, 3>> grad;  // physical
};

std::vector<QuadPoint> quadrature(const ElementOracle& el, int m) {
  const auto xq = gll_nodes(m - 1);
  const auto wq = gll_weights(m - 1);
  std::vector<QuadPoint> pts;
  pts.reserve(static_cast<size_t>(m) * m * m);
  for (int c = 0; c < m; ++c)
    for (int b = 0; b < m; ++b)
      for (int a = 0; a < m; ++a) {
        QuadPoint qp;
        const std::array<double, 3> r{xq[a], xq[b], xq[c]};
        qp.w = wq[a] * wq[b] * wq[c];
        qp.geo = el.geometry(r);
        qp.phi.resize(el.n3());
        qp.grad.resize(el.n3());
        for (int i = 0; i < el.n3(); ++i) {
          qp.phi[i] = el.phi(i, r);
          const auto d = el.grad_ref(i, r);
          for (int p = 0; p < 3; ++p) {
            double s = 0.0;
            for (int q = 0; q < 3; ++q) s += d[q] * qp.geo.rx[q][p];
            qp.grad[i][p] = s;
          }
        }
        pts.push_back(std::move(qp));
      }
  return pts;
}

}  // namespace

Dense ElementOracle::stiffness(int m) const {
  const int n = n3();
  Dense A = Dense::Zero(n, n);
  for (const auto& qp : quadrature(*this, m))
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        A(i, j) += qp.w * qp.geo.J *
                   (qp.grad[i][0] * qp.grad[j][0] + qp.grad[i][1] * qp.grad[j][1] + qp.grad[i][2] * qp.grad[j][2]);
  return A;
}

Dense ElementOracle::mass(int m) const {
  const int n = n3();
  Dense B = Dense::Zero(n, n);
  for (const auto& qp : quadrature(*this, m))
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) B(i, j) += qp.w * qp.geo.J * qp.phi[i] * qp.phi[j];
  return B;
}

Dense ElementOracle::advection(int m, std::span<const double> cx, std::span<const double> cy,
                               std::span<const double> cz) const {
  const int n = n3();
  Dense C = Dense::Zero(n, n);
  for (const auto& qp : quadrature(*this, m)) {
    double c[3] = {0.0, 0.0, 0.0};
    for (int k = 0; k < n; ++k) {
      c[0] += cx[k] * qp.phi[k];
      c[1] += cy[k] * qp.phi[k];
      c[2] += cz[k] * qp.phi[k];
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        C(i, j) += qp.w * qp.geo.J * qp.phi[i] *
                   (c[0] * qp.grad[j][0] + c[1] * qp.grad[j][1] + c[2] * qp.grad[j][2]);
  }
  return C;
}

std::array<Dense, 3> ElementOracle::weak_gradient(int m) const {
  const int n = n3();
  std::array<Dense, 3> G{Dense::Zero(n, n), Dense::Zero(n, n), Dense::Zero(n, n)};
  for (const auto& qp : quadrature(*this, m))
    for (int p = 0; p < 3; ++p)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) G[p](i, j) += qp.w * qp.geo.J * qp.grad[i][p] * qp.phi[j];
  return G;
}

Dense boolean_q(const nekmini::Mesh& mesh) {
  Dense Q = Dense::Zero(static_cast<Eigen::Index>(mesh.num_points()), mesh.num_dofs);
  for (size_t i = 0; i < mesh.num_points(); ++i) Q(static_cast<Eigen::Index>(i), mesh.dof_ids[i] - 1) = 1.0;
  return Q;
}

Dense assemble(const nekmini::Mesh& mesh, const std::function<Dense(std::int64_t)>& element) {
  const int npe = mesh.points_per_element();
  Dense L = Dense::Zero(static_cast<Eigen::Index>(mesh.num_points()), static_cast<Eigen::Index>(mesh.num_points()));
  for (std::int64_t e = 0; e < mesh.num_elements; ++e) L.block(e * npe, e * npe, npe, npe) = element(e);
  const Dense Q = boolean_q(mesh);
  return Q.transpose() * L * Q;
}

Dense stiffness_matrix(const nekmini::Mesh& mesh) {
  return assemble(mesh, [&](std::int64_t e) { return ElementOracle(mesh, e).stiffness(mesh.order + 1); });
}

Dense mass_matrix(const nekmini::Mesh& mesh) {
  return assemble(mesh, [&](std::int64_t e) { return ElementOracle(mesh, e).mass(mesh.order + 1); });
}

std::vector<std::int64_t> iota(std::int64_t n) {
  std::vector<std::int64_t> v(n);
  for (std::int64_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

std::vector<std::vector<std::int64_t>> random_topology(int ranks, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> len(0, 24), kmax(1, 48);
  const int K = kmax(rng);
  std::uniform_int_distribution<std::int64_t> id(0, K);
  std::vector<std::vector<std::int64_t>> ids(ranks);
  for (auto& v : ids) {
    v.resize(len(rng));
    for (auto& x : v) x = id(rng);
  }
  return ids;
}

std::vector<std::vector<double>> dense_gs(const std::vector<std::vector<std::int64_t>>& ids,
                                          const std::vector<std::vector<double>>& values, Reduce op) {
  // Q has one column per distinct nonzero id; apply the reduction column by column.
  std::vector<std::int64_t> cols;
  for (const auto& v : ids)
    for (auto x : v)
      if (x != 0) cols.push_back(x);
  std::sort(cols.begin(), cols.end());
  cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
  std::vector<double> acc(cols.size());
  std::vector<bool> init(cols.size(), false);
  auto col = [&](std::int64_t x) { return std::lower_bound(cols.begin(), cols.end(), x) - cols.begin(); };
  for (size_t r = 0; r < ids.size(); ++r)
    for (size_t i = 0; i < ids[r].size(); ++i) {
      if (ids[r][i] == 0) continue;
      const auto c = col(ids[r][i]);
      const double v = values[r][i];
      if (!init[c]) {
        acc[c] = v;
        init[c] = true;
        continue;
      }
      switch (op) {
        case Reduce::add: acc[c] += v; break;
        case Reduce::min: acc[c] = std::min(acc[c], v); break;
        case Reduce::max: acc[c] = std::max(acc[c], v); break;
        case Reduce::mul: acc[c] *= v; break;
      }
    }
  auto out = values;
  for (size_t r = 0; r < ids.size(); ++r)
    for (size_t i = 0; i < ids[r].size(); ++i)
      if (ids[r][i] != 0) out[r][i] = acc[col(ids[r][i])];
  return out;
}

void single_rank(const std::function<void(nekmini::Comm&)>& body) { nekmini::run_ranks(1, {}, body); }

std::vector<double> random_vector(size_t n, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

std::vector<double> random_continuous(const nekmini::Mesh& mesh, std::mt19937_64& rng) {
  const auto g = random_vector(static_cast<size_t>(mesh.num_dofs), rng);
  std::vector<double> v(mesh.num_points());
  for (size_t i = 0; i < v.size(); ++i) v[i] = g[mesh.dof_ids[i] - 1];
  return v;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace oracle
