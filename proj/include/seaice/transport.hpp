#pragma once

#include <limits>
#include <vector>

#include "seaice/grid.hpp"

namespace seaice {

/// Normal velocities on the cell faces of a StructuredGrid, oriented along +x
/// for vertical faces and +y for horizontal ones.
///
/// x_faces: face (i, j) lies at x = i dx between cells (i-1, j) and (i, j),
///   index j * (nx + 1) + i, for i in [0, nx], j in [0, ny).
/// y_faces: face (i, j) lies at y = j dy between cells (i, j-1) and (i, j),
///   index j * nx + i, for i in [0, nx), j in [0, ny].
struct FaceVelocities {
  std::vector<double> x_faces;
  std::vector<double> y_faces;

  /// max |u_f|
  double max_abs() const;
};

/// Average of the two nodal velocities of each face, i.e. the Q1 interpolant
/// at the face midpoint.
FaceVelocities face_velocities(const StructuredGrid& grid, const NodalVectorField& v);

struct AdvectReport {
  double cfl = 0.0;           // max |u_f| dt / dx
  double clamp_max = 0.0;     // largest change made by the bound enforcement
  double boundary_flux = 0.0; // net outflow through the domain boundary over the step
};

/// Explicit Euler step of d_t c + div(v c) = 0 with first-order upwind fluxes.
/// Inflow boundary faces take inflow_value. The result is clamped to [lo, hi].
CellScalarField advect_step(const StructuredGrid& grid, const CellScalarField& field,
                            const FaceVelocities& faces, double dt, double inflow_value,
                            double lo = 0.0, double hi = std::numeric_limits<double>::infinity(),
                            AdvectReport* report = nullptr);

/// Sum of c_i times the cell area.
double total_mass(const StructuredGrid& grid, const CellScalarField& field);

}  // namespace seaice
