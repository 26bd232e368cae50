#pragma once

#include <functional>
#include <vector>

#include "seaice/assembly.hpp"
#include "seaice/newton.hpp"
#include "seaice/transport.hpp"

namespace seaice {

inline constexpr double kDomainLength = 512e3;  // m
inline constexpr double kSecondsPerDay = 86400.0;

/// Scalar field as a function of position (m).
using ScalarFn = std::function<double(double x, double y)>;

struct ProblemSpec {
  int id = 1;
  double length = kDomainLength;
  double dx = 4e3;  // m
  double dt = 1800.0;
  int steps = 1;
  bool single_step = true;  // Problem I: one momentum solve, no transport
  PhysicsParams params;
  ScalarFn initial_A;
  ScalarFn initial_H;
  ForcingFn forcing;
  double inflow_A = 1.0;
  double inflow_H = 0.3;

  /// Cells per side; throws std::invalid_argument if dx does not divide L.
  int cells_per_side() const;
};

/// Concentration of Problem I; coordinates in m.
double problem1_concentration(double x, double y);

ProblemSpec problem1_spec(double dx_m);

/// Forcing of Problem II at time t (s) and position (x, y) in m.
/// Throws std::invalid_argument outside [0, 8] days.
ForcingSample problem2_forcing(double t, double x, double y);

/// Initial thickness of Problem II.
double problem2_thickness(double x, double y);

ProblemSpec problem2_spec(double dx_m, int steps);

struct InitialFields {
  NodalVectorField v;
  CellScalarField A;
  CellScalarField H;
};

/// Zero velocity and the spec's A and H sampled at cell centers.
InitialFields initial_fields(const ProblemSpec& spec, const StructuredGrid& grid);
InitialFields problem2_initial(const StructuredGrid& grid);

enum class NonConvergencePolicy { kAbort, kContinue };

struct StepRecord {
  int step = 0;       // 1-based
  double time = 0.0;  // s, time level of the new velocity
  NewtonStats newton;
  AdvectReport transport_A;
  AdvectReport transport_H;
};

struct SimulationResult {
  NodalVectorField v;
  CellScalarField A;
  CellScalarField H;
  QuadTensorField pi;
  std::vector<StepRecord> steps;
  bool all_converged = true;
  bool aborted = false;

  /// Mean Newton iterations per completed step.
  double mean_newton_iterations() const;
  /// Mean Krylov iterations per linear solve over all steps.
  double mean_krylov_iterations() const;
};

struct SimulationOptions {
  NonConvergencePolicy policy = NonConvergencePolicy::kAbort;
  /// Called after every completed step with the current fields.
  std::function<void(const StepRecord&, const MomentumState&)> on_step;
  NewtonObserver on_newton_iteration;
};

/// Time loop: advect A and H with the previous velocity, refresh P, solve the
/// momentum equation for the new velocity.
SimulationResult run_simulation(const ProblemSpec& spec, const NewtonConfig& config,
                                const SimulationOptions& options = {});

}  // namespace seaice
