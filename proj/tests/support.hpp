#pragma once

#include <memory>

#include "seaice/benchmarks.hpp"

namespace seaice::testing {

/// Grid and momentum state of the first time step of a benchmark problem.
struct FirstStep {
  std::unique_ptr<StructuredGrid> grid;
  ProblemSpec spec;
  MomentumState state;
};

inline FirstStep first_step(const ProblemSpec& spec) {
  FirstStep f;
  f.spec = spec;
  f.grid = std::make_unique<StructuredGrid>(build_grid(spec.length, spec.cells_per_side()));
  InitialFields init = initial_fields(spec, *f.grid);
  f.state = make_momentum_state(*f.grid, spec.params, spec.dt, spec.dt, std::move(init.A), std::move(init.H),
                                std::move(init.v), spec.forcing);
  return f;
}

}  // namespace seaice::testing
