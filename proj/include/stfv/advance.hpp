#pragma once

#include "stfv/entropy_ledger.hpp"
#include "stfv/spacetime_solver.hpp"

namespace stfv {

struct AdvanceResult {
  Trajectory trajectory;
  EntropyBudget budget;
};

/// Solve every slab with the given coupling mode, then run the entropy ledger.
inline AdvanceResult advance(const SlabStates& initial, const Scheme& scheme,
                             const SpaceTimeGrid& grid, CouplingMode mode) {
  AdvanceResult out;
  out.trajectory = march(initial, scheme, grid, mode);
  out.budget = entropy_budget(out.trajectory, scheme);
  return out;
}

/// dt giving the requested CFL number lambda * max(|u| + a) on `states`.
inline double dt_for_cfl(double cfl, double dx, const SlabStates& states, const GasParams& g) {
  return cfl * dx / max_wave_speed(states, g);
}

}  // namespace stfv
