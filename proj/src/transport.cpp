#include "seaice/transport.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace seaice {

double FaceVelocities::max_abs() const {
  double m = 0.0;
  for (double u : x_faces) m = std::max(m, std::abs(u));
  for (double u : y_faces) m = std::max(m, std::abs(u));
  return m;
}

FaceVelocities face_velocities(const StructuredGrid& grid, const NodalVectorField& v) {
  v.check(grid);
  const int nx = grid.nx();
  const int ny = grid.ny();
  FaceVelocities f;
  f.x_faces.resize(static_cast<std::size_t>(nx + 1) * ny);
  f.y_faces.resize(static_cast<std::size_t>(nx) * (ny + 1));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      const Vec2 a = v.at(grid.node_index(i, j));
      const Vec2 b = v.at(grid.node_index(i, j + 1));
      f.x_faces[static_cast<std::size_t>(j) * (nx + 1) + i] = 0.5 * (a.x + b.x);
    }
  }
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const Vec2 a = v.at(grid.node_index(i, j));
      const Vec2 b = v.at(grid.node_index(i + 1, j));
      f.y_faces[static_cast<std::size_t>(j) * nx + i] = 0.5 * (a.y + b.y);
    }
  }
  return f;
}

CellScalarField advect_step(const StructuredGrid& grid, const CellScalarField& field,
                            const FaceVelocities& faces, double dt, double inflow_value, double lo,
                            double hi, AdvectReport* report) {
  field.check(grid);
  const int nx = grid.nx();
  const int ny = grid.ny();
  if (faces.x_faces.size() != static_cast<std::size_t>(nx + 1) * ny ||
      faces.y_faces.size() != static_cast<std::size_t>(nx) * (ny + 1)) {
    throw std::invalid_argument("advect_step: face velocities do not match the grid");
  }
  if (!(dt >= 0.0)) throw std::invalid_argument("advect_step: negative time step");

  // Fluxes per unit face length times dt / dx, i.e. Courant number times the upwind value.
  const double sx = dt / grid.dx();
  const double sy = dt / grid.dy();
  std::vector<double> fx(faces.x_faces.size());
  std::vector<double> fy(faces.y_faces.size());
  double outflow = 0.0;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * (nx + 1) + i;
      const double u = faces.x_faces[k];
      double up;
      if (u > 0.0) {
        up = i == 0 ? inflow_value : field[grid.cell_index(i - 1, j)];
      } else {
        up = i == nx ? inflow_value : field[grid.cell_index(i, j)];
      }
      fx[k] = sx * u * up;
      if (i == 0) outflow -= u * up * grid.dy();
      if (i == nx) outflow += u * up * grid.dy();
    }
  }
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * nx + i;
      const double u = faces.y_faces[k];
      double up;
      if (u > 0.0) {
        up = j == 0 ? inflow_value : field[grid.cell_index(i, j - 1)];
      } else {
        up = j == ny ? inflow_value : field[grid.cell_index(i, j)];
      }
      fy[k] = sy * u * up;
      if (j == 0) outflow -= u * up * grid.dx();
      if (j == ny) outflow += u * up * grid.dx();
    }
  }

  CellScalarField out(grid);
  double clamp = 0.0;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int c = grid.cell_index(i, j);
      const std::size_t w = static_cast<std::size_t>(j) * (nx + 1) + i;
      const std::size_t s = static_cast<std::size_t>(j) * nx + i;
      const double updated = field[c] - (fx[w + 1] - fx[w]) - (fy[s + nx] - fy[s]);
      const double bounded = std::clamp(updated, lo, hi);
      clamp = std::max(clamp, std::abs(bounded - updated));
      out[c] = bounded;
    }
  }
  if (report != nullptr) {
    report->cfl = faces.max_abs() * dt / grid.dx();
    report->clamp_max = clamp;
    report->boundary_flux = outflow * dt;
  }
  return out;
}

double total_mass(const StructuredGrid& grid, const CellScalarField& field) {
  field.check(grid);
  double m = 0.0;
  for (double c : field.values()) m += c;
  return m * grid.cell_area();
}

}  // namespace seaice
