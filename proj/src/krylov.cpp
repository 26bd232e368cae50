#include "seaice/krylov.hpp"

#include <cmath>
#include <stdexcept>

namespace seaice {

void IdentityPreconditioner::apply(std::span<const double> r, std::span<double> z) const {
  for (std::size_t i = 0; i < r.size(); ++i) z[i] = r[i];
}

JacobiPreconditioner::JacobiPreconditioner(const CsrMatrix& a) : inv_diag_(a.diagonal()) {
  for (double& d : inv_diag_) {
    if (d == 0.0) throw std::invalid_argument("JacobiPreconditioner: zero diagonal");
    d = 1.0 / d;
  }
}

void JacobiPreconditioner::apply(std::span<const double> r, std::span<double> z) const {
  for (std::size_t i = 0; i < r.size(); ++i) z[i] = inv_diag_[i] * r[i];
}

KrylovStats fgmres(const CsrMatrix& a, const Preconditioner& m, std::span<const double> b,
                   std::span<double> x, const FgmresOptions& opt) {
  const std::size_t n = b.size();
  if (a.rows() != a.cols() || n != static_cast<std::size_t>(a.rows()) || x.size() != n) {
    throw std::invalid_argument("fgmres: dimension mismatch");
  }
  if (opt.restart < 1 || opt.max_iterations < 0 || !(opt.rtol > 0)) {
    throw std::invalid_argument("fgmres: invalid options");
  }

  KrylovStats stats;
  std::vector<double> r(n);
  residual(a, x, b, r);
  double beta = norm2(r);
  stats.initial_residual = beta;
  stats.final_residual = beta;
  stats.history.push_back(beta);

  const double target = opt.rtol * norm2(b);
  if (beta <= target || beta == 0.0) {
    stats.converged = true;
    return stats;
  }

  const int mr = opt.restart;
  // Basis vectors are allocated on demand so short solves stay cheap.
  std::vector<std::vector<double>> v;
  std::vector<std::vector<double>> z;
  std::vector<double> h(static_cast<std::size_t>(mr + 1) * mr);
  auto H = [&](int i, int j) -> double& { return h[static_cast<std::size_t>(j) * (mr + 1) + i]; };
  std::vector<double> cs(mr), sn(mr), g(mr + 1), y(mr);
  std::vector<double> w(n);

  while (stats.iterations < opt.max_iterations) {
    if (v.empty()) v.emplace_back(n);
    for (std::size_t i = 0; i < n; ++i) v[0][i] = r[i] / beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;

    int k = 0;  // number of completed Arnoldi steps in this cycle
    bool breakdown = false;
    while (k < mr && stats.iterations < opt.max_iterations) {
      if (static_cast<int>(z.size()) <= k) z.emplace_back(n);
      m.apply(v[k], z[k]);
      spmv(a, z[k], w);
      for (int i = 0; i <= k; ++i) {
        const double hij = dot(w, v[i]);
        H(i, k) = hij;
        axpy(-hij, v[i], w);
      }
      const double hnext = norm2(w);
      H(k + 1, k) = hnext;

      for (int i = 0; i < k; ++i) {
        const double t = cs[i] * H(i, k) + sn[i] * H(i + 1, k);
        H(i + 1, k) = -sn[i] * H(i, k) + cs[i] * H(i + 1, k);
        H(i, k) = t;
      }
      const double denom = std::hypot(H(k, k), H(k + 1, k));
      if (denom == 0.0) {
        // The preconditioned direction is in the span of the previous basis
        // and carries no new information.
        breakdown = true;
        break;
      }
      cs[k] = H(k, k) / denom;
      sn[k] = H(k + 1, k) / denom;
      H(k, k) = denom;
      H(k + 1, k) = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];

      ++k;
      ++stats.iterations;
      const double est = std::abs(g[k]);
      stats.history.push_back(est);
      if (est <= target || hnext == 0.0) break;
      if (static_cast<int>(v.size()) <= k) v.emplace_back(n);
      for (std::size_t i = 0; i < n; ++i) v[k][i] = w[i] / hnext;
    }

    for (int i = k - 1; i >= 0; --i) {
      double s = g[i];
      for (int j = i + 1; j < k; ++j) s -= H(i, j) * y[j];
      y[i] = s / H(i, i);
    }
    for (int j = 0; j < k; ++j) axpy(y[j], z[j], x);

    residual(a, x, b, r);
    beta = norm2(r);
    stats.final_residual = beta;
    if (beta <= target) {
      stats.converged = true;
      break;
    }
    if (breakdown && k == 0) break;
  }
  return stats;
}

}  // namespace seaice
