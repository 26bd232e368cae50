#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "seaice/benchmarks.hpp"
#include "seaice/io.hpp"

namespace fs = std::filesystem;

namespace {

std::string snapshot_name(const fs::path& dir, int step) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "state_%05d.vtk", step);
  return (dir / buf).string();
}

int run(const seaice::RunConfig& cfg) {
  using namespace seaice;
  const fs::path dir(cfg.out);
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "config.cfg");
    f << render(cfg);
  }

  const ProblemSpec spec = problem_spec(cfg);
  const NewtonConfig ncfg = newton_config(cfg);
  const int steps = spec.single_step ? 1 : spec.steps;
  std::cout << "problem " << spec.id << ", " << spec.cells_per_side() << "^2 cells, " << steps
            << " step(s), newton " << to_string(ncfg.method) << ", linear solver "
            << to_string(ncfg.linear.kind) << std::endl;

  const auto start = std::chrono::steady_clock::now();
  std::ofstream log(dir / "newton_log.csv");
  log << kNewtonLogHeader << '\n';
  SimulationOptions opts;
  opts.policy = cfg.policy;
  opts.on_step = [&](const StepRecord& rec, const MomentumState& state) {
    write_newton_rows(log, rec.step, rec.newton);
    log.flush();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("step %d  t=%.0f s  newton %d  %s  |r|/|r0|=%.3e  %.1f s\n", rec.step, rec.time,
                rec.newton.iterations(), rec.newton.converged ? "converged" : "NOT converged",
                rec.newton.final_residual() / std::max(rec.newton.initial_residual(), 1e-300), secs);
    std::fflush(stdout);
    if (rec.transport_A.cfl > 1.0) {
      std::fprintf(stderr, "warning: step %d transport CFL %.3f exceeds 1\n", rec.step, rec.transport_A.cfl);
    }
    const bool last = rec.step == steps || (!rec.newton.converged && cfg.policy == NonConvergencePolicy::kAbort);
    if (last || (cfg.snapshot_every > 0 && rec.step % cfg.snapshot_every == 0)) {
      write_vtk_snapshot(*state.grid, state.v, state.A, state.H, state.params, snapshot_name(dir, rec.step));
    }
  };
  const SimulationResult res = run_simulation(spec, ncfg, opts);
  log.flush();
  if (!log) throw std::runtime_error("write to newton_log.csv failed");

  std::printf("mean Newton iterations per step %.3f, mean Krylov iterations per solve %.3f\n",
              res.mean_newton_iterations(), res.mean_krylov_iterations());
  if (res.aborted) {
    std::printf("aborted after step %d: Newton did not converge\n", res.steps.back().step);
    return 2;
  }
  return res.all_converged ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return run(seaice::parse_cli(args));
  } catch (const seaice::CliError& e) {
    (e.exit_code() == 0 ? std::cout : std::cerr) << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
