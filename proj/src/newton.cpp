#include "seaice/newton.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "seaice/dense.hpp"
#include "seaice/ilu.hpp"

namespace seaice {

const char* to_string(NewtonMethod m) {
  return m == NewtonMethod::kStandard ? "std" : "sv";
}

const char* to_string(LinearSolverKind k) {
  switch (k) {
    case LinearSolverKind::kAmgFgmres: return "amg";
    case LinearSolverKind::kIluFgmres: return "ilu";
    case LinearSolverKind::kDirect: return "direct";
  }
  return "?";
}

void NewtonConfig::validate() const {
  if (!(reduction > 1.0)) throw std::invalid_argument("residual reduction factor must exceed 1");
  if (max_iterations < 1) throw std::invalid_argument("max iterations must be at least 1");
  if (max_halvings < 0) throw std::invalid_argument("max halvings must be non-negative");
  if (!(pi_tolerance >= 0.0)) throw std::invalid_argument("pi tolerance must be non-negative");
  if (!(linear.fgmres.rtol > 0.0) || linear.fgmres.restart < 1 || linear.fgmres.max_iterations < 1) {
    throw std::invalid_argument("invalid FGMRES options");
  }
  if (!(linear.amg.strong_threshold > 0.0 && linear.amg.strong_threshold < 1.0)) {
    throw std::invalid_argument("AMG strong threshold must lie in (0, 1)");
  }
  if (linear.amg.sweeps < 1) throw std::invalid_argument("AMG sweeps must be at least 1");
}

bool NewtonStats::any_stagnation() const {
  return std::any_of(stagnated.begin(), stagnated.end(), [](char c) { return c != 0; });
}

KrylovStats solve_linear(const CsrMatrix& j, std::span<const double> b, std::span<double> x,
                         const LinearSolverConfig& config) {
  std::fill(x.begin(), x.end(), 0.0);
  switch (config.kind) {
    case LinearSolverKind::kAmgFgmres: {
      const AmgHierarchy amg(j, config.amg);
      return fgmres(j, amg, b, x, config.fgmres);
    }
    case LinearSolverKind::kIluFgmres: {
      const Ilu0 ilu(j);
      return fgmres(j, ilu, b, x, config.fgmres);
    }
    case LinearSolverKind::kDirect: {
      if (j.rows() > config.direct_max_dofs) {
        throw std::invalid_argument("direct solver limited to " + std::to_string(config.direct_max_dofs) +
                                    " unknowns, got " + std::to_string(j.rows()));
      }
      const std::vector<double> sol = dense_lu_solve(j.rows(), j.to_dense(), b);
      std::copy(sol.begin(), sol.end(), x.begin());
      KrylovStats st;
      st.initial_residual = norm2(b);
      std::vector<double> r(b.size());
      residual(j, x, b, r);
      st.final_residual = norm2(r);
      st.converged = true;
      st.history = {st.initial_residual, st.final_residual};
      return st;
    }
  }
  throw std::logic_error("unknown linear solver");
}

LineSearchResult line_search(const MomentumAssembler& assembler, const NodalVectorField& v,
                             std::span<const double> v_tilde, int max_halvings) {
  std::vector<double> step(v_tilde.begin(), v_tilde.end());
  LineSearchResult res;
  double alpha = 1.0;
  for (int h = 0; h <= max_halvings; ++h) {
    if (h > 0) {
      alpha *= 0.5;
      for (double& s : step) s *= 0.5;
    }
    const double change = assembler.energy_change(v, step);
    res.alpha = alpha;
    res.energy_change = change;
    res.halvings = h;
    if (change < 0.0) return res;
  }
  res.stagnated = true;
  return res;
}

MomentumSolution solve_momentum(const MomentumState& state, const NewtonConfig& config,
                                const NewtonObserver& observer) {
  config.validate();
  state.validate();
  const StructuredGrid& grid = *state.grid;
  auto pattern = std::make_shared<const CsrMatrix>(velocity_pattern(grid));
  const MomentumAssembler assembler(state, pattern);

  MomentumSolution sol{state.v, state.pi, {}};
  NewtonStats& stats = sol.stats;
  const bool sv = config.method == NewtonMethod::kStressVelocity;

  std::vector<double> r = assembler.residual(sol.v);
  const double r0 = norm2(r);
  stats.residual_norms.push_back(r0);
  stats.energies.push_back(assembler.energy(sol.v));
  if (!std::isfinite(r0)) throw std::runtime_error("non-finite initial residual");
  const double target = r0 / config.reduction;
  if (r0 < config.absolute_floor) {
    stats.converged = true;
    return sol;
  }

  std::vector<double> v_tilde(grid.num_dofs());
  for (int it = 1; it <= config.max_iterations; ++it) {
    const CsrMatrix jac = sv ? assembler.jacobian_sv(sol.v, sol.pi) : assembler.jacobian_std(sol.v);
    KrylovStats ks = solve_linear(jac, r, v_tilde, config.linear);
    const double relres = ks.initial_residual > 0.0 ? ks.final_residual / ks.initial_residual : 0.0;
    if (!std::isfinite(relres) || (!ks.converged && relres > config.linear.failure_relres)) {
      std::ostringstream msg;
      msg << "linear solve failed in Newton iteration " << it << ": " << ks.iterations
          << " iterations, relative residual " << relres;
      throw LinearSolveError(msg.str());
    }

    const LineSearchResult ls = line_search(assembler, sol.v, v_tilde, config.max_halvings);
    if (sv) {
      const QuadTensorField inc = assembler.pi_increment(sol.v, sol.pi, v_tilde);
      for (std::size_t q = 0; q < sol.pi.size(); ++q) sol.pi.values[q] += ls.alpha * inc.values[q];
      if (config.project_pi) project_pi(sol.pi);
    }
    axpy(ls.alpha, v_tilde, sol.v.values());

    r = assembler.residual(sol.v);
    const double rn = norm2(r);
    stats.alphas.push_back(ls.alpha);
    stats.krylov.push_back(std::move(ks));
    stats.stagnated.push_back(ls.stagnated ? 1 : 0);
    stats.residual_norms.push_back(rn);
    stats.energy_changes.push_back(ls.energy_change);
    stats.energies.push_back(stats.energies.back() + ls.energy_change);
    if (observer) observer(it, stats);
    if (!std::isfinite(rn)) throw std::runtime_error("non-finite residual in Newton iteration");
    if (rn <= target && (!sv || config.pi_tolerance == 0.0 ||
                         assembler.pi_residual(sol.v, sol.pi) <= config.pi_tolerance)) {
      stats.converged = true;
      break;
    }
  }
  return sol;
}

}  // namespace seaice
