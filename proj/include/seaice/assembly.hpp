#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "seaice/csr.hpp"
#include "seaice/grid.hpp"
#include "seaice/rheology.hpp"

namespace seaice {

struct ForcingSample {
  Vec2 wind;   // v_a, m/s
  Vec2 ocean;  // v_o, m/s
};

/// Forcing at time t (s) and position x (m).
using ForcingFn = std::function<ForcingSample(double t, const Vec2& x)>;

/// Everything needed for one implicit momentum step from t - dt to t.
struct MomentumState {
  const StructuredGrid* grid = nullptr;
  PhysicsParams params;
  double dt = 1800.0;  // s
  double t = 0.0;      // time level of the new velocity, s
  CellScalarField A;
  CellScalarField H;
  CellScalarField P;
  NodalVectorField v_prev;  // v^n
  NodalVectorField v;       // current iterate
  QuadTensorField pi;
  ForcingFn forcing;

  /// Recomputes P from A and H.
  void update_strength();
  /// Throws std::invalid_argument on inconsistent sizes or out-of-range fields.
  void validate() const;
};

/// Builds a consistent state: P from A and H, v = v_prev, and pi initialized
/// from v so that the reformulated stress equation holds exactly.
MomentumState make_momentum_state(const StructuredGrid& grid, const PhysicsParams& params, double dt,
                                  double t, CellScalarField A, CellScalarField H,
                                  NodalVectorField v_prev, ForcingFn forcing);

/// Sparsity pattern of the eliminated velocity operator: boundary DOFs only
/// carry their diagonal, interior DOFs couple to interior DOFs of the 3x3
/// node neighbourhood. Values are zero.
CsrMatrix velocity_pattern(const StructuredGrid& grid);

/// Weak-form assembly for one momentum step. Quantities that do not depend on
/// the velocity iterate (coefficients, forcing, load vector) are cached at
/// construction, so the state must not change while the assembler is used.
class MomentumAssembler {
 public:
  explicit MomentumAssembler(const MomentumState& state,
                             std::shared_ptr<const CsrMatrix> pattern = nullptr);

  const StructuredGrid& grid() const { return grid_; }
  const std::vector<double>& load() const { return load_; }

  /// F(phi_i) - A(v, phi_i), zero at Dirichlet DOFs.
  std::vector<double> residual(const NodalVectorField& v) const;
  /// Residual contributions of cells [first, last) only, without the load and
  /// without Dirichlet zeroing; returns -A restricted to those cells.
  void add_operator_cells(const NodalVectorField& v, int first, int last,
                          std::span<double> out) const;

  double energy(const NodalVectorField& v) const;
  /// Phi(v + step) - Phi(v), evaluated termwise so that small changes are not
  /// lost to cancellation.
  double energy_change(const NodalVectorField& v, std::span<const double> step) const;

  /// Standard Newton linearization A'(v).
  CsrMatrix jacobian_std(const NodalVectorField& v) const;
  /// Stress-velocity linearization with the symmetrized, scaled tau x pi term.
  CsrMatrix jacobian_sv(const NodalVectorField& v, const QuadTensorField& pi) const;
  /// Picard-type operator (no rank-one plastic term).
  CsrMatrix jacobian_picard(const NodalVectorField& v) const;

  /// pi = tau(v) / Delta(v) at every quadrature point.
  QuadTensorField pi_from(const NodalVectorField& v) const;
  /// Increment of pi implied by a velocity step v_tilde.
  QuadTensorField pi_increment(const NodalVectorField& v, const QuadTensorField& pi,
                               std::span<const double> v_tilde) const;

  /// max over quadrature points of |pi Delta(v) - tau(v)|_F / Delta(v).
  double pi_residual(const NodalVectorField& v, const QuadTensorField& pi) const;

 private:
  enum class Linearization { kStandard, kStressVelocity, kPicard };
  CsrMatrix assemble_matrix(const NodalVectorField& v, const QuadTensorField* pi,
                            Linearization kind) const;

  struct PointData {
    double weight;     // quadrature weight
    Vec2 ocean;        // v_o
    Vec2 load;         // rho H v^n - dt rho H f_c e_r x (v^n - v_o) + dt tau_atm
  };

  SymTensor2 tau_at(const NodalVectorField& v, int cell, int q) const;
  Vec2 value_at(std::span<const double> v, int cell, int q) const;

  const StructuredGrid& grid_;
  PhysicsParams params_;
  double dt_;
  QuadPointSet quad_;
  std::vector<double> mass_coeff_;  // rho_ice H per cell
  std::vector<double> strength_;    // P per cell
  std::vector<PointData> points_;
  std::vector<double> load_;
  std::shared_ptr<const CsrMatrix> pattern_;

  // Per quadrature point, per local DOF (2k + component): tau(phi) and tr eps(phi).
  std::array<std::array<SymTensor2, 8>, kQuadPerCell> basis_tau_;
  std::array<std::array<double, 8>, kQuadPerCell> basis_trace_;
  std::array<std::array<std::array<double, 8>, 8>, kQuadPerCell> tau_products_;
};

std::vector<double> assemble_residual(const MomentumState& state);
double assemble_energy(const NodalVectorField& v, const MomentumState& state);
CsrMatrix assemble_jacobian_std(const MomentumState& state);
CsrMatrix assemble_jacobian_sv(const MomentumState& state);

/// Cell averages over the quadrature points of Delta(v) and of the shear
/// deformation rate.
void cell_diagnostics(const StructuredGrid& grid, const PhysicsParams& params, const NodalVectorField& v,
                      std::span<double> delta_avg, std::span<double> shear_avg);

/// pi_{l+1} = pi_l + alpha * increment, optionally scaled back into the
/// admissible set sqrt(2 pi:pi) <= 1.
QuadTensorField update_pi(const MomentumState& state, std::span<const double> v_tilde, double alpha,
                          bool project = true);

/// Scales every tensor with sqrt(2 pi:pi) > 1 back onto the unit sphere.
void project_pi(QuadTensorField& pi);

}  // namespace seaice
