#include "seaice/io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "seaice/rheology.hpp"

namespace seaice {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::string exact_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const std::map<std::string, NewtonMethod> kMethods{{"std", NewtonMethod::kStandard},
                                                   {"sv", NewtonMethod::kStressVelocity}};
const std::map<std::string, LinearSolverKind> kSolvers{{"amg", LinearSolverKind::kAmgFgmres},
                                                       {"ilu", LinearSolverKind::kIluFgmres},
                                                       {"direct", LinearSolverKind::kDirect}};
const std::map<std::string, NonConvergencePolicy> kPolicies{{"abort", NonConvergencePolicy::kAbort},
                                                            {"continue", NonConvergencePolicy::kContinue}};

template <class E>
std::string key_of(const std::map<std::string, E>& m, E value) {
  for (const auto& [k, v] : m) {
    if (v == value) return k;
  }
  return "?";
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

void finish_output(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace

void RunConfig::validate() const {
  if (problem != 1 && problem != 2) throw std::invalid_argument("problem must be 1 or 2");
  if (!(dx_km > 0.0 && dt_s > 0.0 && dmin > 0.0 && rtol > 0.0 && reduction > 1.0 && days > 0.0 &&
        pstar > 0.0 && pi_tol >= 0.0)) {
    throw std::invalid_argument("numeric parameters must be positive (reduction > 1)");
  }
  if (restart < 1 || maxit < 1 || amg_sweeps < 1 || newton_maxit < 1 || steps < 0 || snapshot_every < 0) {
    throw std::invalid_argument("iteration counts must be positive");
  }
  if (!(amg_theta > 0.0 && amg_theta < 1.0)) throw std::invalid_argument("AMG threshold must lie in (0, 1)");
  const double n = 512.0 / dx_km;
  if (std::abs(n - std::round(n)) > 1e-9 * n) throw std::invalid_argument("dx-km must divide 512");
}

int RunConfig::num_steps() const {
  if (problem == 1) return 1;
  if (steps > 0) return steps;
  return std::max(1, static_cast<int>(std::lround(days * kSecondsPerDay / dt_s)));
}

RunConfig parse_cli(const std::vector<std::string>& args) {
  RunConfig c;
  CLI::App app{"Implicit viscous-plastic sea-ice solver"};
  app.set_config("--config", "", "Read options from a key = value file");
  app.config_formatter(std::make_shared<CLI::ConfigINI>());
  app.allow_config_extras(false);

  std::string method = key_of(kMethods, c.newton);
  std::string solver = key_of(kSolvers, c.linsolve);
  std::string policy = key_of(kPolicies, c.policy);
  app.add_option("--problem", c.problem, "Benchmark problem (1 or 2)")->check(CLI::IsMember({1, 2}));
  app.add_option("--dx-km", c.dx_km, "Mesh size in km, must divide 512");
  app.add_option("--dt-s", c.dt_s, "Time step in seconds");
  app.add_option("--dmin", c.dmin, "Delta_min regularization");
  app.add_option("--newton", method, "Newton linearization")->check(CLI::IsMember({"std", "sv"}));
  app.add_option("--linsolve", solver, "Linear solver")->check(CLI::IsMember({"amg", "ilu", "direct"}));
  app.add_option("--rtol", c.rtol, "FGMRES relative tolerance");
  app.add_option("--restart", c.restart, "FGMRES restart length");
  app.add_option("--maxit", c.maxit, "FGMRES iteration limit");
  app.add_option("--amg-theta", c.amg_theta, "AMG strong threshold");
  app.add_option("--amg-sweeps", c.amg_sweeps, "SSOR sweeps per AMG level");
  app.add_option("--newton-maxit", c.newton_maxit, "Newton iteration limit");
  app.add_option("--reduction", c.reduction, "Required residual reduction factor");
  app.add_option("--pi-tol", c.pi_tol, "Bound on the pi equation residual at convergence (sv, 0: off)");
  app.add_option("--pstar", c.pstar, "Ice strength parameter P* in N/m^2");
  app.add_option("--days", c.days, "Simulated days (Problem II)");
  app.add_option("--steps", c.steps, "Number of time steps, overrides --days");
  app.add_option("--out", c.out, "Output directory");
  app.add_option("--snapshot-every", c.snapshot_every, "VTK snapshot cadence in steps (0: final only)");
  app.add_option("--on-nonconvergence", policy, "Policy for unconverged steps")
      ->check(CLI::IsMember({"abort", "continue"}));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw CliError(app.help(), 0);
  } catch (const CLI::ParseError& e) {
    throw CliError(std::string(e.what()) + "\n\n" + app.help(), 1);
  }
  c.newton = kMethods.at(method);
  c.linsolve = kSolvers.at(solver);
  c.policy = kPolicies.at(policy);
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw CliError(std::string(e.what()) + "\n\n" + app.help(), 1);
  }
  return c;
}

std::string render(const RunConfig& c) {
  std::ostringstream out;
  out << "# seaice run configuration\n";
  out << "problem = " << c.problem << "\n";
  out << "dx-km = " << exact_double(c.dx_km) << "\n";
  out << "dt-s = " << exact_double(c.dt_s) << "\n";
  out << "dmin = " << exact_double(c.dmin) << "\n";
  out << "newton = " << key_of(kMethods, c.newton) << "\n";
  out << "linsolve = " << key_of(kSolvers, c.linsolve) << "\n";
  out << "rtol = " << exact_double(c.rtol) << "\n";
  out << "restart = " << c.restart << "\n";
  out << "maxit = " << c.maxit << "\n";
  out << "amg-theta = " << exact_double(c.amg_theta) << "\n";
  out << "amg-sweeps = " << c.amg_sweeps << "\n";
  out << "newton-maxit = " << c.newton_maxit << "\n";
  out << "reduction = " << exact_double(c.reduction) << "\n";
  out << "pi-tol = " << exact_double(c.pi_tol) << "\n";
  out << "pstar = " << exact_double(c.pstar) << "\n";
  out << "days = " << exact_double(c.days) << "\n";
  out << "steps = " << c.steps << "\n";
  out << "out = " << c.out << "\n";
  out << "snapshot-every = " << c.snapshot_every << "\n";
  out << "on-nonconvergence = " << key_of(kPolicies, c.policy) << "\n";
  return out.str();
}

NewtonConfig newton_config(const RunConfig& c) {
  NewtonConfig n;
  n.method = c.newton;
  n.reduction = c.reduction;
  n.max_iterations = c.newton_maxit;
  n.pi_tolerance = c.pi_tol;
  n.linear.kind = c.linsolve;
  n.linear.fgmres.rtol = c.rtol;
  n.linear.fgmres.restart = c.restart;
  n.linear.fgmres.max_iterations = c.maxit;
  n.linear.amg.strong_threshold = c.amg_theta;
  n.linear.amg.sweeps = c.amg_sweeps;
  return n;
}

ProblemSpec problem_spec(const RunConfig& c) {
  c.validate();
  ProblemSpec s = c.problem == 1 ? problem1_spec(c.dx_km * 1e3) : problem2_spec(c.dx_km * 1e3, c.num_steps());
  s.dt = c.dt_s;
  s.params.delta_min = c.dmin;
  s.params.P_star = c.pstar;
  return s;
}

void write_newton_rows(std::ostream& out, int step, const NewtonStats& stats) {
  for (int l = 1; l <= stats.iterations(); ++l) {
    const KrylovStats& k = stats.krylov[l - 1];
    const double relres = k.initial_residual > 0.0 ? k.final_residual / k.initial_residual : 0.0;
    out << step << ',' << l << ',' << format_double(stats.residual_norms[l]) << ','
        << format_double(stats.energies[l]) << ',' << format_double(stats.alphas[l - 1]) << ','
        << k.iterations << ',' << format_double(relres) << '\n';
  }
}

void write_newton_log(const std::vector<StepRecord>& steps, const std::string& path) {
  std::ofstream out = open_output(path);
  out << kNewtonLogHeader << '\n';
  for (const auto& s : steps) write_newton_rows(out, s.step, s.newton);
  finish_output(out, path);
}

std::vector<NewtonLogRow> read_newton_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != kNewtonLogHeader) {
    throw std::runtime_error("'" + path + "' does not start with the Newton log header");
  }
  std::vector<NewtonLogRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    NewtonLogRow r{};
    char c1, c2, c3, c4, c5, c6;
    ls >> r.step >> c1 >> r.newton_iter >> c2 >> r.residual_norm >> c3 >> r.energy >> c4 >> r.alpha >> c5 >>
        r.krylov_iters >> c6 >> r.krylov_relres;
    if (!ls || c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',' || c5 != ',' || c6 != ',') {
      throw std::runtime_error("malformed Newton log row in '" + path + "': " + line);
    }
    rows.push_back(r);
  }
  return rows;
}

void write_vtk_snapshot(const StructuredGrid& grid, const NodalVectorField& v, const CellScalarField& A,
                        const CellScalarField& H, const PhysicsParams& params, const std::string& path) {
  v.check(grid);
  A.check(grid);
  H.check(grid);
  std::vector<double> delta_c(grid.num_cells());
  std::vector<double> shear_c(grid.num_cells());
  cell_diagnostics(grid, params, v, delta_c, shear_c);

  std::ofstream out = open_output(path);
  out << "# vtk DataFile Version 3.0\n";
  out << "sea ice state\n";
  out << "ASCII\n";
  out << "DATASET STRUCTURED_GRID\n";
  out << "DIMENSIONS " << grid.nx() + 1 << ' ' << grid.ny() + 1 << " 1\n";
  out << "POINTS " << grid.num_nodes() << " double\n";
  for (int n = 0; n < grid.num_nodes(); ++n) {
    const Vec2 p = grid.node_coords(n);
    out << format_double(p.x) << ' ' << format_double(p.y) << " 0\n";
  }
  out << "POINT_DATA " << grid.num_nodes() << '\n';
  out << "VECTORS velocity double\n";
  for (int n = 0; n < grid.num_nodes(); ++n) {
    const Vec2 u = v.at(n);
    out << format_double(u.x) << ' ' << format_double(u.y) << " 0\n";
  }
  out << "CELL_DATA " << grid.num_cells() << '\n';
  auto scalars = [&](const char* name, auto value) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (int c = 0; c < grid.num_cells(); ++c) out << format_double(value(c)) << '\n';
  };
  scalars("A", [&](int c) { return A[c]; });
  scalars("H", [&](int c) { return H[c]; });
  scalars("P", [&](int c) { return ice_strength(H[c], A[c], params); });
  scalars("shear_deformation", [&](int c) { return shear_c[c]; });
  scalars("delta", [&](int c) { return delta_c[c]; });
  finish_output(out, path);
}

}  // namespace seaice
