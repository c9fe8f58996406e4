#include "nekmini/advection.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "nekmini/error.hpp"
#include "nekmini/tensor.hpp"

namespace nekmini {

const char* to_string(AdvectionVariant v) {
  switch (v) {
    case AdvectionVariant::blocked2d: return "blocked2d";
    case AdvectionVariant::full3d: return "full3d";
    case AdvectionVariant::automatic: return "auto";
  }
  return "?";
}

AdvectionVariant parse_advection_variant(const std::string& s) {
  if (s == "blocked2d") return AdvectionVariant::blocked2d;
  if (s == "full3d") return AdvectionVariant::full3d;
  if (s == "auto") return AdvectionVariant::automatic;
  throw ContractError("unknown advection variant '" + s + "'");
}

int default_nq(int order) { return (3 * (order + 1) + 1) / 2; }

DealiasOperator::DealiasOperator(const Mesh& mesh, const SpectralBasis& basis, int nq)
    : n1_(mesh.order + 1), nq_(nq), ne_(mesh.num_elements) {
  if (basis.order != mesh.order) throw ContractError("DealiasOperator: basis order does not match mesh");
  if (nq < n1_) throw InvalidOrderError("dealiasing grid needs nq >= N+1 (got nq=" + std::to_string(nq) + ")");
  const SpectralBasis fine = make_basis(nq - 1);
  const Matrix J = interp_matrix(basis, fine.nodes).values;
  const Matrix JD = J * basis.diff;
  J_ = J.data;
  JD_ = JD.data;
  Jt_ = J.transpose().data;

  const int q3 = nq * nq * nq, n3 = n1_ * n1_ * n1_;
  for (auto& a : brx_) a.assign(static_cast<size_t>(ne_) * q3, 0.0);
  std::vector<double> xf(3 * static_cast<size_t>(q3)), dx(9 * static_cast<size_t>(q3));
  std::vector<double> work(2 * static_cast<size_t>(q3));
  const double* Df = fine.diff.data.data();
  for (std::int64_t e = 0; e < ne_; ++e) {
    const size_t off = static_cast<size_t>(e) * n3;
    const double* coords[3] = {mesh.x.data() + off, mesh.y.data() + off, mesh.z.data() + off};
    for (int p = 0; p < 3; ++p) {
      double* xp = xf.data() + p * static_cast<size_t>(q3);
      tensor::apply3(nq, n1_, J_.data(), J_.data(), J_.data(), coords[p], xp, work.data());
      tensor::contract_r(nq, nq, Df, xp, dx.data() + (3 * p + 0) * static_cast<size_t>(q3), nq * nq);
      tensor::contract_s(nq, nq, Df, xp, dx.data() + (3 * p + 1) * static_cast<size_t>(q3), nq, nq);
      tensor::contract_t(nq, nq, Df, xp, dx.data() + (3 * p + 2) * static_cast<size_t>(q3), nq * nq);
    }
    for (int q = 0; q < q3; ++q) {
      double a[3][3];
      for (int p = 0; p < 3; ++p)
        for (int s = 0; s < 3; ++s) a[p][s] = dx[(3 * p + s) * static_cast<size_t>(q3) + q];
      const double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                         a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                         a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
      double inv[3][3];
      inv[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]);
      inv[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]);
      inv[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]);
      inv[1][0] = (a[1][2] * a[2][0] - a[1][0] * a[2][2]);
      inv[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]);
      inv[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]);
      inv[2][0] = (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
      inv[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]);
      inv[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]);
      const int i = q % nq, j = (q / nq) % nq, k = q / (nq * nq);
      const double rho = fine.weights[i] * fine.weights[j] * fine.weights[k];
      // B rx = rho * J * adj / J = rho * adj
      for (int s = 0; s < 3; ++s)
        for (int p = 0; p < 3; ++p) brx_[3 * s + p][static_cast<size_t>(e) * q3 + q] = rho * inv[s][p];
      (void)det;
    }
  }
}

DealiasOperator::Contravariant DealiasOperator::contravariant(std::span<const double> cx,
                                                              std::span<const double> cy,
                                                              std::span<const double> cz) const {
  const int q3 = nq_ * nq_ * nq_, n3 = n1_ * n1_ * n1_;
  const size_t np = static_cast<size_t>(ne_) * n3;
  if (cx.size() != np || cy.size() != np || cz.size() != np)
    throw ContractError("advection: advecting field length mismatch");
  Contravariant out;
  for (auto& a : out) a.assign(static_cast<size_t>(ne_) * q3, 0.0);
  std::vector<double> cf(3 * static_cast<size_t>(q3)), work(2 * static_cast<size_t>(q3));
  const double* in[3] = {cx.data(), cy.data(), cz.data()};
  for (std::int64_t e = 0; e < ne_; ++e) {
    for (int p = 0; p < 3; ++p)
      tensor::apply3(nq_, n1_, J_.data(), J_.data(), J_.data(), in[p] + static_cast<size_t>(e) * n3,
                     cf.data() + p * static_cast<size_t>(q3), work.data());
    const size_t off = static_cast<size_t>(e) * q3;
    for (int s = 0; s < 3; ++s) {
      const double* b0 = brx_[3 * s + 0].data() + off;
      const double* b1 = brx_[3 * s + 1].data() + off;
      const double* b2 = brx_[3 * s + 2].data() + off;
      double* o = out[s].data() + off;
      for (int q = 0; q < q3; ++q) o[q] = b0[q] * cf[q] + b1[q] * cf[q3 + q] + b2[q] * cf[2 * q3 + q];
    }
  }
  return out;
}

void DealiasOperator::axpby(Contravariant& out, double a, const Contravariant& x, double b, const Contravariant& y) {
  for (int s = 0; s < 3; ++s) {
    out[s].resize(x[s].size());
    for (size_t i = 0; i < x[s].size(); ++i) out[s][i] = a * x[s][i] + b * y[s][i];
  }
}

std::int64_t DealiasOperator::flops_per_element() const {
  const std::int64_t n = n1_, q = nq_;
  return 2 * (2 * q * n * n * n) + 3 * (2 * q * n * q * n) + 3 * (2 * q * n * q * q) + 5 * q * q * q +
         2 * n * q * q * q + 2 * n * q * n * q + 2 * n * q * n * n;
}

void DealiasOperator::apply(const Contravariant& c, std::span<const double> u, std::span<double> out,
                            AdvectionVariant variant, KernelCounters* counters) const {
  const size_t np = static_cast<size_t>(ne_) * n1_ * n1_ * n1_;
  if (u.size() != np || out.size() != np) throw ContractError("advection: field length mismatch");
  if (variant == AdvectionVariant::automatic)
    throw ContractError("advection: resolve the automatic variant before applying");
  if (variant == AdvectionVariant::full3d)
    apply_full3d(c, u.data(), out.data());
  else
    apply_blocked2d(c, u.data(), out.data());
  if (counters) {
    counters->flops += ne_ * flops_per_element();
    counters->memory_refs += ne_ * (2 * static_cast<std::int64_t>(n1_) * n1_ * n1_ +
                                    3 * static_cast<std::int64_t>(nq_) * nq_ * nq_);
  }
}

void DealiasOperator::apply_full3d(const Contravariant& c, const double* u, double* out) const {
  const int n = n1_, q = nq_;
  const int q3 = q * q * q, n3 = n * n * n;
  const size_t big = static_cast<size_t>(q3);
  std::vector<double> buf(9 * big);
  double* a = buf.data();
  double* b = a + big;
  double* cc = b + big;
  double* d = cc + big;
  double* e = d + big;
  double* ur = e + big;
  double* us = ur + big;
  double* ut = us + big;
  double* f = ut + big;
  std::vector<double> work(2 * big);
  for (std::int64_t el = 0; el < ne_; ++el) {
    const double* ue = u + static_cast<size_t>(el) * n3;
    tensor::contract_r(q, n, J_.data(), ue, a, n * n);
    tensor::contract_r(q, n, JD_.data(), ue, b, n * n);
    tensor::contract_s(q, n, J_.data(), a, cc, q, n);
    tensor::contract_s(q, n, JD_.data(), a, d, q, n);
    tensor::contract_s(q, n, J_.data(), b, e, q, n);
    tensor::contract_t(q, n, J_.data(), e, ur, q * q);
    tensor::contract_t(q, n, J_.data(), d, us, q * q);
    tensor::contract_t(q, n, JD_.data(), cc, ut, q * q);
    const size_t off = static_cast<size_t>(el) * q3;
    const double* c0 = c[0].data() + off;
    const double* c1 = c[1].data() + off;
    const double* c2 = c[2].data() + off;
    for (int i = 0; i < q3; ++i) f[i] = c0[i] * ur[i] + c1[i] * us[i] + c2[i] * ut[i];
    tensor::apply3(n, q, Jt_.data(), Jt_.data(), Jt_.data(), f, out + static_cast<size_t>(el) * n3, work.data());
  }
}

void DealiasOperator::apply_blocked2d(const Contravariant& c, const double* u, double* out) const {
  const int n = n1_, q = nq_;
  const int q2 = q * q, q3 = q2 * q, n2 = n * n, n3 = n2 * n;
  // Column arrays: every coarse t-plane interpolated in r and s.
  std::vector<double> a(static_cast<size_t>(q) * n2), b(static_cast<size_t>(q) * n2);
  std::vector<double> cc(static_cast<size_t>(q2) * n), d(static_cast<size_t>(q2) * n), e(static_cast<size_t>(q2) * n);
  std::vector<double> f(q2), t1(static_cast<size_t>(q) * n), g(n2);
  for (std::int64_t el = 0; el < ne_; ++el) {
    const double* ue = u + static_cast<size_t>(el) * n3;
    double* oe = out + static_cast<size_t>(el) * n3;
    tensor::contract_r(q, n, J_.data(), ue, a.data(), n2);
    tensor::contract_r(q, n, JD_.data(), ue, b.data(), n2);
    tensor::contract_s(q, n, J_.data(), a.data(), cc.data(), q, n);
    tensor::contract_s(q, n, JD_.data(), a.data(), d.data(), q, n);
    tensor::contract_s(q, n, J_.data(), b.data(), e.data(), q, n);
    std::fill(oe, oe + n3, 0.0);
    const size_t off = static_cast<size_t>(el) * q3;
    for (int kf = 0; kf < q; ++kf) {
      const double* jrow = J_.data() + static_cast<size_t>(kf) * n;
      const double* jdrow = JD_.data() + static_cast<size_t>(kf) * n;
      const double* c0 = c[0].data() + off + static_cast<size_t>(kf) * q2;
      const double* c1 = c[1].data() + off + static_cast<size_t>(kf) * q2;
      const double* c2 = c[2].data() + off + static_cast<size_t>(kf) * q2;
      for (int p = 0; p < q2; ++p) {
        double ur = 0.0, us = 0.0, ut = 0.0;
        for (int k = 0; k < n; ++k) {
          const size_t idx = static_cast<size_t>(k) * q2 + p;
          ur += jrow[k] * e[idx];
          us += jrow[k] * d[idx];
          ut += jdrow[k] * cc[idx];
        }
        f[p] = c0[p] * ur + c1[p] * us + c2[p] * ut;
      }
      tensor::contract_r(n, q, Jt_.data(), f.data(), t1.data(), q);
      tensor::contract_s(n, q, Jt_.data(), t1.data(), g.data(), n, 1);
      for (int k = 0; k < n; ++k) {
        const double w = jrow[k];
        double* ok = oe + static_cast<size_t>(k) * n2;
        for (int p = 0; p < n2; ++p) ok[p] += w * g[p];
      }
    }
  }
}

int select_fastest(const std::vector<std::function<void()>>& candidates, int reps) {
  if (candidates.empty()) throw ContractError("select_fastest: no candidates");
  if (candidates.size() == 1) return 0;
  reps = std::max(reps, 1);
  int best = 0;
  double best_t = 0.0;
  for (size_t c = 0; c < candidates.size(); ++c) {
    std::vector<double> t;
    for (int r = 0; r < reps; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      candidates[c]();
      t.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    std::sort(t.begin(), t.end());
    const double med = t[t.size() / 2];
    if (c == 0 || med < best_t) {
      best_t = med;
      best = static_cast<int>(c);
    }
  }
  return best;
}

AdvectionVariant select_advection_variant(const DealiasOperator& op, int reps) {
  if (op.nq() > 10) return AdvectionVariant::blocked2d;
  const size_t np = static_cast<size_t>(op.num_elements()) * op.n1() * op.n1() * op.n1();
  std::vector<double> u(np), out(np), cx(np), cy(np), cz(np);
  for (size_t i = 0; i < np; ++i) {
    u[i] = std::sin(0.37 * static_cast<double>(i));
    cx[i] = std::cos(0.11 * static_cast<double>(i));
    cy[i] = std::sin(0.23 * static_cast<double>(i));
    cz[i] = std::cos(0.05 * static_cast<double>(i));
  }
  const auto c = op.contravariant(cx, cy, cz);
  const std::vector<AdvectionVariant> cand{AdvectionVariant::blocked2d, AdvectionVariant::full3d};
  std::vector<std::function<void()>> fns;
  for (auto v : cand) fns.push_back([&, v] { op.apply(c, u, out, v); });
  return cand[select_fastest(fns, reps)];
}

}  // namespace nekmini
