#pragma once

#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "seaice/benchmarks.hpp"
#include "seaice/newton.hpp"

namespace seaice {

struct RunConfig {
  int problem = 1;
  double dx_km = 4.0;
  double dt_s = 1800.0;
  double dmin = 2e-9;
  NewtonMethod newton = NewtonMethod::kStressVelocity;
  LinearSolverKind linsolve = LinearSolverKind::kAmgFgmres;
  double rtol = 1e-8;
  int restart = 100;
  int maxit = 300;
  double amg_theta = 0.5;
  int amg_sweeps = 3;
  int newton_maxit = 200;
  double reduction = 1e4;
  double pi_tol = 1e-3;
  double pstar = 27.5;
  double days = 1.0;
  int steps = 0;  // 0: derived from days
  std::string out = "out";
  int snapshot_every = 0;  // 0: final state only
  NonConvergencePolicy policy = NonConvergencePolicy::kAbort;

  /// Throws std::invalid_argument on non-positive values or a dx that does
  /// not divide the domain.
  void validate() const;
  /// Time steps of the run: 1 for Problem I, else steps or days / dt.
  int num_steps() const;

  bool operator==(const RunConfig&) const = default;
};

/// Raised for bad command lines; carries the message to print and the exit code.
class CliError : public std::runtime_error {
 public:
  CliError(const std::string& message, int exit_code)
      : std::runtime_error(message), exit_code_(exit_code) {}
  int exit_code() const { return exit_code_; }

 private:
  int exit_code_;
};

/// Parses flags and an optional --config file whose keys mirror the long flag
/// names; flags override the file. --help raises CliError with exit code 0.
RunConfig parse_cli(const std::vector<std::string>& args);

/// "key = value" lines accepted by --config.
std::string render(const RunConfig& config);

NewtonConfig newton_config(const RunConfig& config);
ProblemSpec problem_spec(const RunConfig& config);

/// CSV header of the Newton log.
inline constexpr const char* kNewtonLogHeader =
    "step,newton_iter,residual_norm,energy,alpha,krylov_iters,krylov_relres";

/// One row per Newton update of the step, without the header.
void write_newton_rows(std::ostream& out, int step, const NewtonStats& stats);
void write_newton_log(const std::vector<StepRecord>& steps, const std::string& path);

struct NewtonLogRow {
  int step;
  int newton_iter;
  double residual_norm;
  double energy;
  double alpha;
  int krylov_iters;
  double krylov_relres;
};

/// Parses a file written by write_newton_log. Throws on schema mismatch.
std::vector<NewtonLogRow> read_newton_log(const std::string& path);

/// Legacy ASCII VTK structured grid with nodal velocity and the cell fields
/// A, H, P, shear_deformation and delta.
void write_vtk_snapshot(const StructuredGrid& grid, const NodalVectorField& v, const CellScalarField& A,
                        const CellScalarField& H, const PhysicsParams& params, const std::string& path);

}  // namespace seaice
