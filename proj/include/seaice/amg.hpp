#pragma once

#include <memory>
#include <span>
#include <vector>

#include "seaice/csr.hpp"
#include "seaice/dense.hpp"
#include "seaice/krylov.hpp"

namespace seaice {

enum class StrengthMeasure {
  kAbsolute,  // |a_ij| >= theta max_k |a_ik|
  kNegative,  // -a_ij >= theta max_k (-a_ik), the usual M-matrix form
};

struct AmgParams {
  double strong_threshold = 0.5;
  int sweeps = 3;          // SSOR sweeps before and after coarse correction
  int max_levels = 25;
  int coarse_size = 64;    // solve directly once a level has at most this many rows
  StrengthMeasure strength = StrengthMeasure::kAbsolute;
  /// Only couple DOFs of the same velocity component (interleaved numbering)
  /// when measuring strength; the "unknown" approach for systems.
  bool per_component = false;
  /// Coarsen whole nodes (blocks of num_components interleaved unknowns)
  /// using block Frobenius norms; interpolation then couples only equal
  /// components of strongly connected nodes.
  bool nodal = true;
  int num_components = 2;
};

/// Strength-of-connection graph: row i lists the j that i strongly depends on.
CsrMatrix strength_graph(const CsrMatrix& a, const AmgParams& params);

/// Classical Ruge-Stueben C/F splitting (first pass plus the second pass that
/// guarantees a common C point for every strong F-F pair). Returns 1 for C.
std::vector<char> rs_coarsening(const CsrMatrix& strength);

/// Classical (Ruge-Stueben) interpolation with weak connections lumped onto
/// the diagonal. Columns are numbered by the coarse index of the C points.
CsrMatrix classical_interpolation(const CsrMatrix& a, const CsrMatrix& strength,
                                  std::span<const char> is_coarse);

/// One symmetric Gauss-Seidel sweep (SSOR with omega = 1): forward then backward.
void ssor_sweep(const CsrMatrix& a, std::span<const double> inv_diag, std::span<const double> b,
                std::span<double> x);

struct AmgLevel {
  CsrMatrix a;
  CsrMatrix interpolation;  // to this level from the next coarser one
  CsrMatrix restriction;    // interpolation transposed
  std::vector<double> inv_diag;
  std::vector<char> is_coarse;
};

/// Classical AMG hierarchy applied as a V(nu, nu)-cycle preconditioner.
class AmgHierarchy final : public Preconditioner {
 public:
  AmgHierarchy(const CsrMatrix& a, const AmgParams& params = {});

  /// One V-cycle with zero initial guess.
  void apply(std::span<const double> r, std::span<double> z) const override;

  int num_levels() const { return static_cast<int>(levels_.size()); }
  const AmgLevel& level(int l) const { return levels_[l]; }
  const AmgParams& params() const { return params_; }
  /// Sum of nonzeros over all levels divided by the finest-level nonzeros.
  double operator_complexity() const;

 private:
  void cycle(int level, std::span<const double> b, std::span<double> x) const;

  AmgParams params_;
  std::vector<AmgLevel> levels_;
  DenseLu coarse_lu_;
  bool coarse_is_diagonal_ = false;
};

}  // namespace seaice
