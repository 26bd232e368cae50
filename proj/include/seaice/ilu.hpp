#pragma once

#include <span>
#include <vector>

#include "seaice/csr.hpp"
#include "seaice/krylov.hpp"

namespace seaice {

/// Zero-fill incomplete LU factorization in the natural ordering. L (unit
/// diagonal, not stored) and U share the sparsity pattern of A.
class Ilu0 final : public Preconditioner {
 public:
  /// Requires a square matrix whose pattern includes every diagonal entry.
  explicit Ilu0(const CsrMatrix& a);

  void apply(std::span<const double> r, std::span<double> z) const override;

  /// True if a zero pivot was replaced by a small shift.
  bool pivot_shifted() const { return pivot_shifted_; }
  /// Combined factors stored in A's pattern (strict lower part is L).
  const CsrMatrix& factors() const { return lu_; }

 private:
  CsrMatrix lu_;
  std::vector<std::size_t> diag_;
  bool pivot_shifted_ = false;
};

}  // namespace seaice
