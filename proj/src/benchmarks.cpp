#include "seaice/benchmarks.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace seaice {

int ProblemSpec::cells_per_side() const {
  if (!(dx > 0.0)) throw std::invalid_argument("mesh size must be positive");
  const double n = length / dx;
  const double rounded = std::round(n);
  if (rounded < 1.0 || std::abs(n - rounded) > 1e-9 * n) {
    throw std::invalid_argument("mesh size does not divide the domain length");
  }
  return static_cast<int>(rounded);
}

double problem1_concentration(double x, double y) {
  const double xs = x / 1e6;
  const double ys = y / 1e6;
  const double r = 0.04 - (xs - 0.25) * (xs - 0.25) - (ys - 0.25) * (ys - 0.25);
  const double r1 = 0.1 + (2.0 * xs) * (2.0 * xs) - 2.0 * ys;
  return 1.0 - 0.5 * std::exp(-800.0 * std::abs(r)) - 0.4 * std::exp(-90.0 * std::abs(r1)) -
         0.4 * std::exp(-90.0 * std::abs(r1 + 0.7));
}

ProblemSpec problem1_spec(double dx_m) {
  ProblemSpec s;
  s.id = 1;
  s.dx = dx_m;
  s.cells_per_side();
  s.steps = 1;
  s.single_step = true;
  s.initial_A = problem1_concentration;
  s.initial_H = [](double x, double y) { return 2.0 * problem1_concentration(x, y); };
  s.forcing = [](double, const Vec2&) { return ForcingSample{{5.0, 5.0}, {0.0, 0.0}}; };
  s.inflow_H = 2.0;
  return s;
}

ForcingSample problem2_forcing(double t, double x, double y) {
  const double days = t / kSecondsPerDay;
  if (!(days >= 0.0 && days <= 8.0)) throw std::invalid_argument("forcing time outside [0, 8] days");
  const double l = kDomainLength;
  ForcingSample f;
  f.ocean = {0.01 * (-1.0 + 2.0 * y / l), 0.01 * (1.0 - 2.0 * x / l)};

  const bool first = days <= 4.0;
  const double vmax = first ? 15.0 * -std::tanh((4.0 - days) * (4.0 + days) / 2.0)
                            : 15.0 * std::tanh((12.0 - days) * (days - 4.0) / 2.0);
  const double alpha = (first ? 72.0 : 81.0) * std::numbers::pi / 180.0;
  const double m = first ? 256.0 + 51.2 * days : 665.6 - 51.2 * days;  // km
  const double dx = x / 1e3 - m;
  const double dy = y / 1e3 - m;
  const double omega = std::exp(-std::sqrt(dx * dx + dy * dy) / 100.0) / 50.0;
  const double ca = std::cos(alpha);
  const double sa = std::sin(alpha);
  f.wind = {omega * vmax * (ca * dx + sa * dy), omega * vmax * (-sa * dx + ca * dy)};
  return f;
}

double problem2_thickness(double x, double y) {
  return 0.3 + 0.005 * (std::sin(60.0 * x / 1e6) + std::sin(30.0 * y / 1e6));
}

ProblemSpec problem2_spec(double dx_m, int steps) {
  if (steps < 1) throw std::invalid_argument("number of steps must be positive");
  ProblemSpec s;
  s.id = 2;
  s.dx = dx_m;
  s.cells_per_side();
  s.steps = steps;
  s.single_step = false;
  s.initial_A = [](double, double) { return 1.0; };
  s.initial_H = problem2_thickness;
  s.forcing = [](double t, const Vec2& p) { return problem2_forcing(t, p.x, p.y); };
  s.inflow_A = 1.0;
  s.inflow_H = 0.3;
  return s;
}

InitialFields initial_fields(const ProblemSpec& spec, const StructuredGrid& grid) {
  InitialFields f{NodalVectorField(grid), CellScalarField(grid), CellScalarField(grid)};
  for (int c = 0; c < grid.num_cells(); ++c) {
    const Vec2 p = grid.cell_center(c);
    f.A[c] = spec.initial_A(p.x, p.y);
    f.H[c] = spec.initial_H(p.x, p.y);
  }
  return f;
}

InitialFields problem2_initial(const StructuredGrid& grid) {
  return initial_fields(problem2_spec(grid.dx(), 1), grid);
}

double SimulationResult::mean_newton_iterations() const {
  if (steps.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& s : steps) sum += s.newton.iterations();
  return sum / static_cast<double>(steps.size());
}

double SimulationResult::mean_krylov_iterations() const {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& s : steps) {
    for (const auto& k : s.newton.krylov) {
      sum += k.iterations;
      ++count;
    }
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

SimulationResult run_simulation(const ProblemSpec& spec, const NewtonConfig& config,
                                const SimulationOptions& options) {
  config.validate();
  spec.params.validate();
  if (!(spec.dt > 0.0)) throw std::invalid_argument("time step must be positive");
  if (spec.steps < 1) throw std::invalid_argument("number of steps must be positive");
  const StructuredGrid grid = build_grid(spec.length, spec.cells_per_side());
  InitialFields init = initial_fields(spec, grid);

  SimulationResult res;
  res.v = std::move(init.v);
  res.A = std::move(init.A);
  res.H = std::move(init.H);
  const int steps = spec.single_step ? 1 : spec.steps;
  for (int n = 1; n <= steps; ++n) {
    StepRecord rec;
    rec.step = n;
    rec.time = n * spec.dt;
    if (!spec.single_step) {
      const FaceVelocities faces = face_velocities(grid, res.v);
      res.A = advect_step(grid, res.A, faces, spec.dt, spec.inflow_A, 0.0, 1.0, &rec.transport_A);
      res.H = advect_step(grid, res.H, faces, spec.dt, spec.inflow_H, 0.0,
                          std::numeric_limits<double>::infinity(), &rec.transport_H);
    }
    MomentumState state =
        make_momentum_state(grid, spec.params, spec.dt, rec.time, res.A, res.H, res.v, spec.forcing);
    MomentumSolution sol = solve_momentum(state, config, options.on_newton_iteration);
    rec.newton = std::move(sol.stats);
    state.v = std::move(sol.v);
    state.pi = std::move(sol.pi);
    const bool ok = rec.newton.converged;
    res.all_converged = res.all_converged && ok;
    if (options.on_step) options.on_step(rec, state);
    res.v = std::move(state.v);
    res.pi = std::move(state.pi);
    res.steps.push_back(std::move(rec));
    if (!ok && options.policy == NonConvergencePolicy::kAbort) {
      res.aborted = true;
      break;
    }
  }
  return res;
}

}  // namespace seaice
