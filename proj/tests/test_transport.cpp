#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "seaice/transport.hpp"
#include "support.hpp"

using namespace seaice;

namespace {

NodalVectorField uniform_velocity(const StructuredGrid& g, Vec2 u) {
  NodalVectorField v(g);
  for (int n = 0; n < g.num_nodes(); ++n) v.set(n, u);
  return v;
}

// Q1 interpolant of v at an arbitrary point, by bilinear weights.
Vec2 interpolate(const StructuredGrid& g, const NodalVectorField& v, Vec2 p) {
  const int i = std::min(static_cast<int>(p.x / g.dx()), g.nx() - 1);
  const int j = std::min(static_cast<int>(p.y / g.dy()), g.ny() - 1);
  const double s = p.x / g.dx() - i;
  const double t = p.y / g.dy() - j;
  const Vec2 a = v.at(g.node_index(i, j)), b = v.at(g.node_index(i + 1, j));
  const Vec2 c = v.at(g.node_index(i, j + 1)), d = v.at(g.node_index(i + 1, j + 1));
  return {(1 - s) * (1 - t) * a.x + s * (1 - t) * b.x + (1 - s) * t * c.x + s * t * d.x,
          (1 - s) * (1 - t) * a.y + s * (1 - t) * b.y + (1 - s) * t * c.y + s * t * d.y};
}

}  // namespace

TEST_CASE("face velocities") {
  const StructuredGrid g = build_grid(10.0, 5);
  SUBCASE("zero") {
    const FaceVelocities f = face_velocities(g, NodalVectorField(g));
    CHECK(f.x_faces.size() == 30u);
    CHECK(f.y_faces.size() == 30u);
    CHECK(f.max_abs() == 0.0);
  }
  SUBCASE("uniform x velocity") {
    const FaceVelocities f = face_velocities(g, uniform_velocity(g, {1.0, 0.0}));
    for (double u : f.x_faces) CHECK(u == 1.0);
    for (double u : f.y_faces) CHECK(u == 0.0);
  }
  SUBCASE("random field matches the interpolant at face midpoints") {
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(-1, 1);
    NodalVectorField v(g);
    for (int n = 0; n < g.num_nodes(); ++n) v.set(n, {u(rng), u(rng)});
    const FaceVelocities f = face_velocities(g, v);
    for (int j = 0; j < g.ny(); ++j) {
      for (int i = 0; i <= g.nx(); ++i) {
        const Vec2 m = interpolate(g, v, {i * g.dx(), (j + 0.5) * g.dy()});
        CHECK(std::abs(f.x_faces[j * (g.nx() + 1) + i] - m.x) <= 1e-14);
      }
    }
    for (int j = 0; j <= g.ny(); ++j) {
      for (int i = 0; i < g.nx(); ++i) {
        const Vec2 m = interpolate(g, v, {(i + 0.5) * g.dx(), j * g.dy()});
        CHECK(std::abs(f.y_faces[j * g.nx() + i] - m.y) <= 1e-14);
      }
    }
  }
}

TEST_CASE("zero velocity leaves the field unchanged") {
  const StructuredGrid g = build_grid(10.0, 5);
  CellScalarField c(g);
  for (int k = 0; k < g.num_cells(); ++k) c[k] = 0.1 * k;
  const CellScalarField out = advect_step(g, c, face_velocities(g, NodalVectorField(g)), 100.0, 7.0);
  CHECK(out.values() == c.values());
}

TEST_CASE("1D translation matches the scalar upwind update exactly") {
  // Dyadic grid, time step and data, so both forms of the update are exact.
  const StructuredGrid g = build_grid(16.0, 16);
  const double dt = 0.25;
  for (double u : {1.0, -1.0, 2.0, 0.5}) {
    CellScalarField c(g);
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i) c[g.cell_index(i, j)] = ((i * 5 + 3) % 16) / 16.0;
    const double inflow = 0.75;
    const FaceVelocities f = face_velocities(g, uniform_velocity(g, {u, 0.0}));
    const CellScalarField out = advect_step(g, c, f, dt, inflow, -1e300, 1e300);
    const double s = u * dt / g.dx();
    for (int j = 0; j < g.ny(); ++j) {
      for (int i = 0; i < g.nx(); ++i) {
        const double ci = c[g.cell_index(i, j)];
        double expect;
        if (u > 0) {
          const double left = i == 0 ? inflow : c[g.cell_index(i - 1, j)];
          expect = ci - s * (ci - left);
        } else {
          const double right = i == g.nx() - 1 ? inflow : c[g.cell_index(i + 1, j)];
          expect = ci - s * (right - ci);
        }
        CHECK(out[g.cell_index(i, j)] == expect);
      }
    }
  }
}

TEST_CASE("conservation with closed boundaries") {
  const StructuredGrid g = build_grid(100e3, 20);
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  // Interior velocity only; boundary nodes at rest, so boundary faces carry no flux.
  NodalVectorField v(g);
  for (int n = 0; n < g.num_nodes(); ++n) {
    if (!g.is_boundary_node(n)) v.set(n, {0.2 * (u(rng) - 0.5), 0.2 * (u(rng) - 0.5)});
  }
  CellScalarField c(g);
  for (int k = 0; k < g.num_cells(); ++k) c[k] = 0.3 + 0.1 * u(rng);
  const FaceVelocities f = face_velocities(g, v);
  const double m0 = total_mass(g, c);
  CellScalarField cur = c;
  for (int step = 0; step < 50; ++step) {
    AdvectReport rep;
    cur = advect_step(g, cur, f, 1800.0, 1.0, -1e300, 1e300, &rep);
    CHECK(rep.clamp_max == 0.0);
    CHECK(rep.boundary_flux == 0.0);
    CHECK(rep.cfl <= 1.0);
  }
  CHECK(std::abs(total_mass(g, cur) - m0) <= 1e-12 * m0);
}

TEST_CASE("monotone under CFL <= 1 for divergence-free flow") {
  // Rotation plus translation: linear, so the face averages are exact and the
  // net flux of a constant field through every cell vanishes.
  const StructuredGrid g = build_grid(100e3, 20);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  NodalVectorField v(g);
  for (int n = 0; n < g.num_nodes(); ++n) {
    const Vec2 p = g.node_coords(n);
    v.set(n, {0.1 - 2e-6 * (p.y - 40e3), -0.05 + 2e-6 * (p.x - 60e3)});
  }
  CellScalarField c(g);
  for (int k = 0; k < g.num_cells(); ++k) c[k] = 0.5 + 0.5 * u(rng);
  const FaceVelocities f = face_velocities(g, v);
  // Limit the time step so that the total outflow Courant number of every cell is at most 1.
  const double dt = 0.25 * g.dx() / f.max_abs();
  const double inflow = 0.5;
  AdvectReport rep;
  const CellScalarField out = advect_step(g, c, f, dt, inflow, -1e300, 1e300, &rep);
  CHECK(rep.cfl <= 0.25 + 1e-15);
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      double lo = c[g.cell_index(i, j)], hi = lo;
      auto take = [&](int ii, int jj) {
        const double val = (ii < 0 || jj < 0 || ii >= g.nx() || jj >= g.ny()) ? inflow : c[g.cell_index(ii, jj)];
        lo = std::min(lo, val);
        hi = std::max(hi, val);
      };
      take(i - 1, j);
      take(i + 1, j);
      take(i, j - 1);
      take(i, j + 1);
      const double x = out[g.cell_index(i, j)];
      CHECK(x >= lo - 1e-15);
      CHECK(x <= hi + 1e-15);
    }
  }
}

TEST_CASE("clamping keeps fields in range and reports the correction") {
  const StructuredGrid g = build_grid(4.0, 4);
  CellScalarField c(g, 1.0);
  // Converging flow towards the center piles concentration above one.
  NodalVectorField v(g);
  const Vec2 center{2.0, 2.0};
  for (int n = 0; n < g.num_nodes(); ++n) {
    if (g.is_boundary_node(n)) continue;
    const Vec2 p = g.node_coords(n);
    v.set(n, {center.x - p.x, center.y - p.y});
  }
  AdvectReport rep;
  const CellScalarField out = advect_step(g, c, face_velocities(g, v), 0.2, 1.0, 0.0, 1.0, &rep);
  CHECK(rep.clamp_max > 0.0);
  for (double x : out.values()) {
    CHECK(x >= 0.0);
    CHECK(x <= 1.0);
  }
  // Diverging flow empties cells, thickness stays non-negative.
  for (int n = 0; n < g.num_nodes(); ++n) v.set(n, -1.0 * v.at(n));
  const CellScalarField h = advect_step(g, CellScalarField(g, 0.1), face_velocities(g, v), 2.0, 0.0, 0.0,
                                        std::numeric_limits<double>::infinity(), &rep);
  for (double x : h.values()) CHECK(x >= 0.0);
}

TEST_CASE("size mismatches are rejected") {
  const StructuredGrid g = build_grid(4.0, 4);
  const StructuredGrid other = build_grid(4.0, 3);
  const FaceVelocities f = face_velocities(other, NodalVectorField(other));
  CHECK_THROWS_AS(advect_step(g, CellScalarField(g), f, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(advect_step(g, CellScalarField(other), face_velocities(g, NodalVectorField(g)), 1.0, 0.0),
                  std::invalid_argument);
}
