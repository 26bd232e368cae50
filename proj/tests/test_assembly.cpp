#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "seaice/assembly.hpp"
#include "seaice/dense.hpp"
#include "support.hpp"

using namespace seaice;

namespace {

// A small problem with nonuniform coefficients and nonzero forcing.
struct Fixture {
  std::unique_ptr<StructuredGrid> grid;
  MomentumState state;
};

Fixture fixture(int n, unsigned seed, double vscale = 0.1) {
  Fixture f;
  f.grid = std::make_unique<StructuredGrid>(build_grid(kDomainLength, n));
  const StructuredGrid& g = *f.grid;
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  CellScalarField A(g), H(g);
  for (int c = 0; c < g.num_cells(); ++c) {
    A[c] = 0.5 + 0.5 * u(rng);
    H[c] = 0.1 + 0.4 * u(rng);
  }
  NodalVectorField vp(g);
  for (int node = 0; node < g.num_nodes(); ++node) {
    if (!g.is_boundary_node(node)) vp.set(node, {vscale * (u(rng) - 0.5), vscale * (u(rng) - 0.5)});
  }
  PhysicsParams params;
  params.f_c = 1.46e-4;
  f.state = make_momentum_state(g, params, 1800.0, 2 * kSecondsPerDay, A, H, vp,
                                [](double t, const Vec2& x) { return problem2_forcing(t, x.x, x.y); });
  return f;
}

NodalVectorField random_velocity(const StructuredGrid& g, std::mt19937& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  NodalVectorField v(g);
  for (int node = 0; node < g.num_nodes(); ++node) {
    if (!g.is_boundary_node(node)) v.set(node, {u(rng), u(rng)});
  }
  return v;
}

// Residual F(phi_i) - A(v, phi_i) by a direct loop over cells and Gauss points,
// with every quantity recomputed from the shape functions.
std::vector<double> oracle_residual(const MomentumState& s, const NodalVectorField& v) {
  const StructuredGrid& g = *s.grid;
  const PhysicsParams& p = s.params;
  const GaussRule rule = gauss_quadrature();
  std::vector<double> r(g.num_dofs(), 0.0);
  const double jac = g.cell_area() / 4.0;
  for (int c = 0; c < g.num_cells(); ++c) {
    const auto nodes = g.cell_nodes(c);
    const double rho_h = p.rho_ice * s.H[c];
    const double strength = p.P_star * s.H[c] * std::exp(-p.C_conc * (1.0 - s.A[c]));
    for (int q = 0; q < kQuadPerCell; ++q) {
      const ShapeValues sh = shape_eval(g, c, rule.points[q]);
      const double w = rule.weights[q] * jac;
      Vec2 x, vq, vn;
      double ux = 0, uy = 0, wx = 0, wy = 0;  // v = (u, w)
      for (int k = 0; k < 4; ++k) {
        const Vec2 xk = g.node_coords(nodes[k]);
        x.x += sh.values[k] * xk.x;
        x.y += sh.values[k] * xk.y;
        vq.x += sh.values[k] * v.values()[2 * nodes[k]];
        vq.y += sh.values[k] * v.values()[2 * nodes[k] + 1];
        vn.x += sh.values[k] * s.v_prev.values()[2 * nodes[k]];
        vn.y += sh.values[k] * s.v_prev.values()[2 * nodes[k] + 1];
        ux += sh.gradients[k].x * v.values()[2 * nodes[k]];
        uy += sh.gradients[k].y * v.values()[2 * nodes[k]];
        wx += sh.gradients[k].x * v.values()[2 * nodes[k] + 1];
        wy += sh.gradients[k].y * v.values()[2 * nodes[k] + 1];
      }
      const ForcingSample f = s.forcing(s.t, x);
      // tau = dev(eps) / e + tr(eps) / 2 I
      const double ie = 1.0 / p.e_ellipse;
      const double tr = ux + wy;
      const double txx = ie * (ux - 0.5 * tr) + 0.5 * tr;
      const double tyy = ie * (wy - 0.5 * tr) + 0.5 * tr;
      const double txy = ie * 0.5 * (uy + wx);
      const double dl = std::sqrt(p.delta_min * p.delta_min + 2.0 * (txx * txx + 2 * txy * txy + tyy * tyy));
      const double ox = f.ocean.x - vq.x, oy = f.ocean.y - vq.y;
      const double on = std::hypot(ox, oy);
      const double an = std::hypot(f.wind.x, f.wind.y);
      const double load_x = rho_h * vn.x + s.dt * rho_h * p.f_c * (vn.y - f.ocean.y) +
                            s.dt * p.C_a * p.rho_a * an * f.wind.x;
      const double load_y = rho_h * vn.y - s.dt * rho_h * p.f_c * (vn.x - f.ocean.x) +
                            s.dt * p.C_a * p.rho_a * an * f.wind.y;
      const double mx = rho_h * vq.x - s.dt * p.C_o * p.rho_o * on * ox;
      const double my = rho_h * vq.y - s.dt * p.C_o * p.rho_o * on * oy;
      for (int k = 0; k < 4; ++k) {
        const double n = sh.values[k];
        const Vec2 gk = sh.gradients[k];
        // tau(phi) for phi = N e_x and N e_y, contracted with tau(v).
        const double trx = gk.x, try_ = gk.y;
        const double cx = (ie * 0.5 * gk.x + 0.5 * gk.x) * txx + 2 * (ie * 0.5 * gk.y) * txy +
                          (-ie * 0.5 * gk.x + 0.5 * gk.x) * tyy;
        const double cy = (-ie * 0.5 * gk.y + 0.5 * gk.y) * txx + 2 * (ie * 0.5 * gk.x) * txy +
                          (ie * 0.5 * gk.y + 0.5 * gk.y) * tyy;
        const double ax = mx * n + s.dt * (strength / dl * cx - 0.5 * strength * trx);
        const double ay = my * n + s.dt * (strength / dl * cy - 0.5 * strength * try_);
        r[2 * nodes[k]] += w * (load_x * n - ax);
        r[2 * nodes[k] + 1] += w * (load_y * n - ay);
      }
    }
  }
  for (int node = 0; node < g.num_nodes(); ++node) {
    if (g.is_boundary_node(node)) r[2 * node] = r[2 * node + 1] = 0.0;
  }
  return r;
}

double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

bool is_spd(const CsrMatrix& m) {
  const int n = m.rows();
  std::vector<double> a = m.to_dense();
  for (int j = 0; j < n; ++j) {
    double d = a[static_cast<std::size_t>(j) * n + j];
    for (int k = 0; k < j; ++k) d -= a[static_cast<std::size_t>(j) * n + k] * a[static_cast<std::size_t>(j) * n + k];
    if (!(d > 0.0)) return false;
    const double l = std::sqrt(d);
    a[static_cast<std::size_t>(j) * n + j] = l;
    for (int i = j + 1; i < n; ++i) {
      double s = a[static_cast<std::size_t>(i) * n + j];
      for (int k = 0; k < j; ++k) s -= a[static_cast<std::size_t>(i) * n + k] * a[static_cast<std::size_t>(j) * n + k];
      a[static_cast<std::size_t>(i) * n + j] = s / l;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("residual matches a direct quadrature loop") {
  for (int n : {2, 3, 5}) {
    const Fixture f = fixture(n, 10 + n);
    std::mt19937 rng(n);
    const MomentumAssembler asmb(f.state);
    for (int t = 0; t < 3; ++t) {
      const NodalVectorField v = random_velocity(*f.grid, rng, 0.2);
      const auto got = asmb.residual(v);
      const auto expect = oracle_residual(f.state, v);
      const double scale = max_abs(expect);
      REQUIRE(scale > 0.0);
      for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - expect[i]) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("trivial states") {
  // No ice thickness, no forcing, no motion: nothing happens.
  const StructuredGrid g = build_grid(kDomainLength, 3);
  const ForcingFn calm = [](double, const Vec2&) { return ForcingSample{}; };
  const MomentumState s =
      make_momentum_state(g, PhysicsParams{}, 1800.0, 1800.0, CellScalarField(g, 0.0), CellScalarField(g, 0.0),
                          NodalVectorField(g), calm);
  for (double r : assemble_residual(s)) CHECK(r == 0.0);
  CHECK(assemble_energy(s.v, s) == 0.0);

  // Ocean at rest, no wind, uniform pressure: the pressure term integrates to
  // zero against interior test functions, so v = 0 is the solution.
  const MomentumState s2 = make_momentum_state(g, PhysicsParams{}, 1800.0, 1800.0, CellScalarField(g, 1.0),
                                               CellScalarField(g, 1.0), NodalVectorField(g), calm);
  const auto r2 = assemble_residual(s2);
  CHECK(max_abs(r2) <= 1e-9);
}

TEST_CASE("residual is minus the energy gradient") {
  const Fixture f = fixture(4, 21);
  const MomentumAssembler asmb(f.state);
  std::mt19937 rng(22);
  for (int t = 0; t < 4; ++t) {
    const NodalVectorField v = random_velocity(*f.grid, rng, 0.2);
    const NodalVectorField w = random_velocity(*f.grid, rng, 1.0);
    const auto r = asmb.residual(v);
    const double exact = -dot(r, w.values());
    const double h = 1e-5;
    NodalVectorField vp = v, vm = v;
    axpy(h, w.values(), vp.values());
    axpy(-h, w.values(), vm.values());
    const double fd = (asmb.energy(vp) - asmb.energy(vm)) / (2 * h);
    CHECK(std::abs(fd - exact) <= 1e-5 * std::abs(exact));
    std::vector<double> step(w.values());
    for (double& x : step) x *= 2 * h;
    const double fd2 = asmb.energy_change(vm, step) / (2 * h);
    CHECK(std::abs(fd2 - exact) <= 1e-5 * std::abs(exact));
    CHECK(asmb.energy_change(v, std::vector<double>(v.size(), 0.0)) == 0.0);
  }
}

TEST_CASE("energy change agrees with the energy difference") {
  const Fixture f = fixture(4, 23);
  const MomentumAssembler asmb(f.state);
  std::mt19937 rng(24);
  for (int t = 0; t < 5; ++t) {
    const NodalVectorField v = random_velocity(*f.grid, rng, 0.2);
    const NodalVectorField s = random_velocity(*f.grid, rng, 0.1);
    NodalVectorField v1 = v;
    axpy(1.0, s.values(), v1.values());
    const double diff = asmb.energy(v1) - asmb.energy(v);
    const double change = asmb.energy_change(v, s.values());
    CHECK(std::abs(diff - change) <= 1e-9 * (std::abs(asmb.energy(v)) + std::abs(diff)));
  }
}

TEST_CASE("energy is convex along random segments") {
  const Fixture f = fixture(4, 25);
  const MomentumAssembler asmb(f.state);
  std::mt19937 rng(26);
  for (int t = 0; t < 20; ++t) {
    const NodalVectorField a = random_velocity(*f.grid, rng, 0.3);
    const NodalVectorField b = random_velocity(*f.grid, rng, 0.3);
    NodalVectorField m = a;
    for (std::size_t i = 0; i < m.size(); ++i) m.values()[i] = 0.5 * (a.values()[i] + b.values()[i]);
    const double ea = asmb.energy(a), eb = asmb.energy(b), em = asmb.energy(m);
    CHECK(em <= 0.5 * (ea + eb) + 1e-12 * (std::abs(ea) + std::abs(eb)));
  }
}

TEST_CASE("standard Jacobian is the derivative of minus the residual") {
  const Fixture f = fixture(4, 27);
  const MomentumAssembler asmb(f.state);
  std::mt19937 rng(28);
  for (int t = 0; t < 3; ++t) {
    const NodalVectorField v = random_velocity(*f.grid, rng, 0.2);
    const NodalVectorField w = random_velocity(*f.grid, rng, 1.0);
    const CsrMatrix j = asmb.jacobian_std(v);
    const auto jw = spmv(j, w.values());
    const double h = 1e-7;
    NodalVectorField vp = v, vm = v;
    axpy(h, w.values(), vp.values());
    axpy(-h, w.values(), vm.values());
    const auto rp = asmb.residual(vp);
    const auto rm = asmb.residual(vm);
    std::vector<double> fd(rp.size());
    for (std::size_t i = 0; i < fd.size(); ++i) fd[i] = -(rp[i] - rm[i]) / (2 * h);
    std::vector<double> diff(fd.size());
    for (std::size_t i = 0; i < fd.size(); ++i) {
      if (f.grid->is_boundary_node(static_cast<int>(i / 2))) continue;
      diff[i] = fd[i] - jw[i];
    }
    CHECK(norm2(diff) <= 1e-5 * norm2(fd));
  }
}

TEST_CASE("Jacobians are symmetric and the boundary rows are identity rows") {
  const Fixture f = fixture(5, 29);
  const MomentumAssembler asmb(f.state);
  std::mt19937 rng(30);
  const NodalVectorField v = random_velocity(*f.grid, rng, 0.2);
  QuadTensorField pi = asmb.pi_from(random_velocity(*f.grid, rng, 0.2));
  for (const CsrMatrix& j : {asmb.jacobian_std(v), asmb.jacobian_sv(v, pi), asmb.jacobian_picard(v)}) {
    CHECK(j.asymmetry() <= 1e-14 * j.max_abs());
    for (int node = 0; node < f.grid->num_nodes(); ++node) {
      if (!f.grid->is_boundary_node(node)) continue;
      for (int a = 0; a < 2; ++a) {
        const int row = 2 * node + a;
        CHECK(j.offsets()[row + 1] - j.offsets()[row] == 1u);
        CHECK(j.at(row, row) == 1.0);
      }
    }
  }
}

TEST_CASE("stress-velocity Jacobian reduces to the standard one when pi = tau / Delta") {
  const Fixture f = fixture(4, 31);
  const MomentumAssembler asmb(f.state);
  std::mt19937 rng(32);
  for (double scale : {1e-4, 0.2}) {
    const NodalVectorField v = random_velocity(*f.grid, rng, scale);
    const auto js = asmb.jacobian_std(v).to_dense();
    const auto jv = asmb.jacobian_sv(v, asmb.pi_from(v)).to_dense();
    double worst = 0.0, big = 0.0;
    for (std::size_t i = 0; i < js.size(); ++i) {
      worst = std::max(worst, std::abs(js[i] - jv[i]));
      big = std::max(big, std::abs(js[i]));
    }
    CHECK(worst <= 1e-12 * big);
  }
}

TEST_CASE("pi = 0 gives the Picard operator") {
  const Fixture f = fixture(4, 33);
  const MomentumAssembler asmb(f.state);
  std::mt19937 rng(34);
  const NodalVectorField v = random_velocity(*f.grid, rng, 0.2);
  const QuadTensorField zero(f.grid->num_cells(), kQuadPerCell);
  CHECK(asmb.jacobian_sv(v, zero).to_dense() == asmb.jacobian_picard(v).to_dense());
}

TEST_CASE("Jacobians are positive definite on a 16x16 grid") {
  const Fixture f = fixture(16, 35);
  const MomentumAssembler asmb(f.state);
  std::mt19937 rng(36);
  const NodalVectorField v = random_velocity(*f.grid, rng, 0.2);
  CHECK(is_spd(asmb.jacobian_std(v)));
  CHECK(is_spd(asmb.jacobian_picard(v)));
  // Any admissible pi, not only tau / Delta.
  QuadTensorField pi = asmb.pi_from(random_velocity(*f.grid, rng, 0.2));
  CHECK(is_spd(asmb.jacobian_sv(v, pi)));
  std::uniform_real_distribution<double> u(-1, 1);
  for (auto& t : pi.values) t = SymTensor2{u(rng), u(rng), u(rng)};
  project_pi(pi);
  CHECK(is_spd(asmb.jacobian_sv(v, pi)));
}

TEST_CASE("cell contributions are additive") {
  const Fixture f = fixture(5, 37);
  const MomentumAssembler asmb(f.state);
  std::mt19937 rng(38);
  const NodalVectorField v = random_velocity(*f.grid, rng, 0.2);
  const int n = f.grid->num_cells();
  std::vector<double> all(f.grid->num_dofs(), 0.0), parts(f.grid->num_dofs(), 0.0);
  asmb.add_operator_cells(v, 0, n, all);
  asmb.add_operator_cells(v, 0, 7, parts);
  asmb.add_operator_cells(v, 7, 19, parts);
  asmb.add_operator_cells(v, 19, n, parts);
  for (std::size_t i = 0; i < all.size(); ++i) CHECK(std::abs(all[i] - parts[i]) <= 1e-12 * max_abs(all));
}

TEST_CASE("pi update") {
  Fixture f = fixture(4, 39);
  const MomentumAssembler asmb(f.state);
  std::mt19937 rng(40);
  f.state.v = random_velocity(*f.grid, rng, 0.2);
  const QuadTensorField exact = asmb.pi_from(f.state.v);
  const std::vector<double> zero(f.grid->num_dofs(), 0.0);

  SUBCASE("a consistent pi with a zero step is unchanged") {
    f.state.pi = exact;
    const QuadTensorField next = update_pi(f.state, zero, 1.0);
    for (std::size_t i = 0; i < next.size(); ++i) {
      CHECK(frobenius_norm(next.values[i] - exact.values[i]) <= 1e-14);
    }
  }
  SUBCASE("a full zero step restores tau / Delta") {
    f.state.pi = QuadTensorField(f.grid->num_cells(), kQuadPerCell);
    const QuadTensorField next = update_pi(f.state, zero, 1.0);
    for (std::size_t i = 0; i < next.size(); ++i) {
      CHECK(frobenius_norm(next.values[i] - exact.values[i]) <= 1e-14);
    }
    const QuadTensorField half = update_pi(f.state, zero, 0.5);
    for (std::size_t i = 0; i < half.size(); ++i) {
      CHECK(frobenius_norm(half.values[i] - 0.5 * exact.values[i]) <= 1e-14);
    }
  }
  SUBCASE("linear in alpha without projection, bounded with it") {
    f.state.pi = exact;
    const NodalVectorField vt = random_velocity(*f.grid, rng, 0.5);
    const QuadTensorField one = update_pi(f.state, vt.values(), 1.0, false);
    const QuadTensorField third = update_pi(f.state, vt.values(), 1.0 / 3.0, false);
    for (std::size_t i = 0; i < one.size(); ++i) {
      const SymTensor2 lin = exact.values[i] + (1.0 / 3.0) * (one.values[i] - exact.values[i]);
      CHECK(frobenius_norm(third.values[i] - lin) <= 1e-12 * (1.0 + frobenius_norm(one.values[i])));
    }
    const QuadTensorField projected = update_pi(f.state, vt.values(), 1.0, true);
    for (std::size_t i = 0; i < projected.size(); ++i) {
      CHECK(pi_magnitude(projected.values[i]) <= 1.0 + 1e-15);
      if (pi_magnitude(one.values[i]) <= 1.0) CHECK(projected.values[i].xx == one.values[i].xx);
    }
  }
  SUBCASE("projection examples") {
    QuadTensorField p(1, 4);
    p.values[0] = SymTensor2{0.5, 0.0, 0.0};        // magnitude sqrt(0.5)
    p.values[1] = SymTensor2{2.0, 0.0, 0.0};        // magnitude 2 sqrt(2)
    p.values[2] = SymTensor2{0.0, 1.0, 0.0};        // magnitude 2
    p.values[3] = SymTensor2{};
    project_pi(p);
    CHECK(p.values[0].xx == 0.5);
    CHECK(p.values[1].xx == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(p.values[2].xy == doctest::Approx(0.5));
    CHECK(p.values[3].xx == 0.0);
  }
}

TEST_CASE("pi residual is small after converging Problem I at 8 km") {
  const auto f = testing::first_step(problem1_spec(8e3));
  const MomentumSolution sol = solve_momentum(f.state, NewtonConfig{});
  CHECK(sol.stats.converged);
  const MomentumAssembler asmb(f.state);
  CHECK(asmb.pi_residual(sol.v, sol.pi) <= 1e-3);
}
