#include "seaice/ilu.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace seaice {

Ilu0::Ilu0(const CsrMatrix& a) : lu_(a), diag_(a.rows()) {
  if (a.rows() != a.cols()) throw std::invalid_argument("Ilu0: matrix must be square");
  const int n = a.rows();
  const auto off = lu_.offsets();
  const auto col = lu_.columns();
  auto val = lu_.values();

  double max_diag = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto k = lu_.find(i, i);
    if (k < 0) throw std::invalid_argument("Ilu0: missing diagonal entry");
    diag_[i] = static_cast<std::size_t>(k);
    max_diag = std::max(max_diag, std::abs(val[k]));
  }
  const double shift = 1e-12 * (max_diag > 0.0 ? max_diag : 1.0);

  // IKJ variant; position lookup of row k's columns via a dense marker.
  std::vector<std::ptrdiff_t> pos(n, -1);
  for (int i = 0; i < n; ++i) {
    for (std::size_t p = off[i]; p < off[i + 1]; ++p) pos[col[p]] = static_cast<std::ptrdiff_t>(p);
    for (std::size_t p = off[i]; p < diag_[i]; ++p) {
      const int k = col[p];
      const double lik = val[p] / val[diag_[k]];
      val[p] = lik;
      for (std::size_t q = diag_[k] + 1; q < off[k + 1]; ++q) {
        const auto t = pos[col[q]];
        if (t >= 0) val[t] -= lik * val[q];
      }
    }
    if (val[diag_[i]] == 0.0) {
      val[diag_[i]] = shift;
      pivot_shifted_ = true;
    }
    for (std::size_t p = off[i]; p < off[i + 1]; ++p) pos[col[p]] = -1;
  }
}

void Ilu0::apply(std::span<const double> r, std::span<double> z) const {
  const int n = lu_.rows();
  const auto off = lu_.offsets();
  const auto col = lu_.columns();
  const auto val = lu_.values();
  for (int i = 0; i < n; ++i) {
    double s = r[i];
    for (std::size_t p = off[i]; p < diag_[i]; ++p) s -= val[p] * z[col[p]];
    z[i] = s;
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = z[i];
    for (std::size_t p = diag_[i] + 1; p < off[i + 1]; ++p) s -= val[p] * z[col[p]];
    z[i] = s / val[diag_[i]];
  }
}

}  // namespace seaice
