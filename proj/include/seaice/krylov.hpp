#pragma once

#include <span>
#include <vector>

#include "seaice/csr.hpp"

namespace seaice {

/// Approximate inverse z = M^-1 r.
class Preconditioner {
 public:
  virtual ~Preconditioner() = default;
  virtual void apply(std::span<const double> r, std::span<double> z) const = 0;
};

class IdentityPreconditioner final : public Preconditioner {
 public:
  void apply(std::span<const double> r, std::span<double> z) const override;
};

class JacobiPreconditioner final : public Preconditioner {
 public:
  explicit JacobiPreconditioner(const CsrMatrix& a);
  void apply(std::span<const double> r, std::span<double> z) const override;

 private:
  std::vector<double> inv_diag_;
};

struct KrylovStats {
  int iterations = 0;
  double initial_residual = 0.0;
  double final_residual = 0.0;  // true residual ||b - A x||
  bool converged = false;
  /// Residual estimate after every iteration (index 0 is the initial residual).
  std::vector<double> history;
};

struct FgmresOptions {
  double rtol = 1e-8;
  int restart = 100;
  int max_iterations = 300;
};

/// Right-preconditioned flexible GMRES. x holds the initial guess on entry.
/// Convergence means ||b - A x|| <= rtol ||b||; hitting the iteration limit is
/// reported through the stats.
KrylovStats fgmres(const CsrMatrix& a, const Preconditioner& m, std::span<const double> b,
                   std::span<double> x, const FgmresOptions& options = {});

}  // namespace seaice
