#include "seaice/dense.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace seaice {

DenseLu::DenseLu(int n, std::vector<double> a) : n_(n), lu_(std::move(a)), perm_(n) {
  if (lu_.size() != static_cast<std::size_t>(n) * n) throw std::invalid_argument("DenseLu: size mismatch");
  for (int i = 0; i < n; ++i) perm_[i] = i;
  auto at = [&](int i, int j) -> double& { return lu_[static_cast<std::size_t>(i) * n + j]; };
  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::abs(at(k, k));
    for (int i = k + 1; i < n; ++i) {
      if (std::abs(at(i, k)) > best) {
        best = std::abs(at(i, k));
        piv = i;
      }
    }
    if (best == 0.0 || !std::isfinite(best)) {
      throw std::runtime_error("DenseLu: matrix is singular (zero pivot in column " + std::to_string(k) + ")");
    }
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(at(k, j), at(piv, j));
      std::swap(perm_[k], perm_[piv]);
    }
    const double inv = 1.0 / at(k, k);
    for (int i = k + 1; i < n; ++i) {
      const double l = at(i, k) * inv;
      at(i, k) = l;
      if (l == 0.0) continue;
      for (int j = k + 1; j < n; ++j) at(i, j) -= l * at(k, j);
    }
  }
}

void DenseLu::solve(std::span<double> b) const {
  if (b.size() != static_cast<std::size_t>(n_)) throw std::invalid_argument("DenseLu::solve: size mismatch");
  std::vector<double> y(n_);
  for (int i = 0; i < n_; ++i) y[i] = b[perm_[i]];
  for (int i = 0; i < n_; ++i) {
    double s = y[i];
    const double* row = &lu_[static_cast<std::size_t>(i) * n_];
    for (int j = 0; j < i; ++j) s -= row[j] * y[j];
    y[i] = s;
  }
  for (int i = n_ - 1; i >= 0; --i) {
    double s = y[i];
    const double* row = &lu_[static_cast<std::size_t>(i) * n_];
    for (int j = i + 1; j < n_; ++j) s -= row[j] * y[j];
    y[i] = s / row[i];
  }
  for (int i = 0; i < n_; ++i) b[i] = y[i];
}

std::vector<double> dense_lu_solve(int n, std::span<const double> a, std::span<const double> b) {
  DenseLu lu(n, std::vector<double>(a.begin(), a.end()));
  std::vector<double> x(b.begin(), b.end());
  lu.solve(x);
  return x;
}

}  // namespace seaice
