#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "seaice/amg.hpp"
#include "seaice/assembly.hpp"
#include "seaice/krylov.hpp"

namespace seaice {

enum class NewtonMethod { kStandard, kStressVelocity };
enum class LinearSolverKind { kAmgFgmres, kIluFgmres, kDirect };

const char* to_string(NewtonMethod m);
const char* to_string(LinearSolverKind k);

struct LinearSolverConfig {
  LinearSolverKind kind = LinearSolverKind::kAmgFgmres;
  FgmresOptions fgmres;
  AmgParams amg;
  /// A Krylov solve that stops above this relative residual is treated as a
  /// failure; between rtol and this value the step is used as is.
  double failure_relres = 1e-3;
  /// Dense factorization refuses systems larger than this.
  int direct_max_dofs = 6000;
};

/// Thrown when a linear solve fails badly enough that the Newton step is
/// meaningless.
class LinearSolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NewtonConfig {
  NewtonMethod method = NewtonMethod::kStressVelocity;
  double reduction = 1e4;
  int max_iterations = 200;
  int max_halvings = 20;
  double absolute_floor = 1e-14;
  bool project_pi = true;
  /// Stress-velocity only: convergence additionally requires
  /// max |pi Delta - tau|_F / Delta <= pi_tolerance. Zero disables the check.
  double pi_tolerance = 1e-3;
  LinearSolverConfig linear;

  void validate() const;
};

/// Solves J x = b with the configured method; x is zeroed first.
KrylovStats solve_linear(const CsrMatrix& j, std::span<const double> b, std::span<double> x,
                         const LinearSolverConfig& config);

struct LineSearchResult {
  double alpha = 1.0;
  double energy_change = 0.0;  // Phi(v + alpha v_tilde) - Phi(v)
  int halvings = 0;
  bool stagnated = false;
};

/// Backtracking on the energy: alpha = 1, 1/2, ... until Phi strictly
/// decreases. Without success after max_halvings the smallest alpha is
/// returned with the stagnation flag set.
LineSearchResult line_search(const MomentumAssembler& assembler, const NodalVectorField& v,
                             std::span<const double> v_tilde, int max_halvings);

struct NewtonStats {
  // Entry 0 belongs to the initial iterate; entry l to the iterate after l
  // updates. Energies after the first are Phi(v_0) plus the accumulated
  // termwise changes.
  std::vector<double> residual_norms;
  std::vector<double> energies;
  // One entry per executed update.
  std::vector<double> alphas;
  std::vector<double> energy_changes;
  std::vector<KrylovStats> krylov;
  std::vector<char> stagnated;
  bool converged = false;

  int iterations() const { return static_cast<int>(alphas.size()); }
  bool any_stagnation() const;
  double initial_residual() const { return residual_norms.empty() ? 0.0 : residual_norms.front(); }
  double final_residual() const { return residual_norms.empty() ? 0.0 : residual_norms.back(); }
};

struct MomentumSolution {
  NodalVectorField v;
  QuadTensorField pi;
  NewtonStats stats;
};

/// Called after every update with the iteration number (1-based) and stats so far.
using NewtonObserver = std::function<void(int iteration, const NewtonStats& stats)>;

/// Newton loop for one implicit momentum step starting from state.v. In the
/// stress-velocity variant pi starts from state.pi.
MomentumSolution solve_momentum(const MomentumState& state, const NewtonConfig& config,
                                const NewtonObserver& observer = {});

}  // namespace seaice
