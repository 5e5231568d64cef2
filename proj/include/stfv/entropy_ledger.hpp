/// Discrete entropy balances of a solved space-time trajectory.
///
/// Numerical entropy fluxes use the symmetric construction
///   F = v_bar . f - psi_bar (space),  U = v_bar . u - phi_bar (time),
/// so that under an EC flux F_{j+1/2} - F_{j-1/2} = v_j . (f_{j+1/2} - f_{j-1/2}).
/// The entropy produced at an interface with flux g is [potential] - [v] . g;
/// each adjacent cell receives half of it.
///
/// The initial-data and final temporal interfaces are boundaries of the
/// space-time domain. Their entropy flux is taken from the adjacent slab
/// state (v^0 . u_init - phi^0 below, U(u^last) above), so no production is
/// attributed to cells there. The entropy generated by imposing the initial
/// data is reported separately as `initial_interface_production`.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "stfv/spacetime_solver.hpp"

namespace stfv {

inline double numerical_entropy_flux_space(const EntropyVars& vL, const EntropyVars& vR,
                                           const Vec3& flux, const GasParams& g) {
  const double psi_bar = arith_mean(flux_potentials(vars_to_prim(vL, g)).psi,
                                    flux_potentials(vars_to_prim(vR, g)).psi);
  return dot(mean_entropy_vars(vL, vR).vec(), flux) - psi_bar;
}

inline double numerical_entropy_flux_time(const EntropyVars& vPast, const EntropyVars& vFuture,
                                          const Vec3& flux, const GasParams& g) {
  const double phi_bar = arith_mean(flux_potentials(vars_to_prim(vPast, g)).phi,
                                    flux_potentials(vars_to_prim(vFuture, g)).phi);
  return dot(mean_entropy_vars(vPast, vFuture).vec(), flux) - phi_bar;
}

struct SlabBudget {
  int slab = 0;
  double t = 0.0;  // time of the slab's upper interface
  std::vector<double> cell_residual;        // R_j^n
  std::vector<double> measured_production;  // from the actual interface fluxes
  std::vector<double> formula_production;   // dt * (temporal + spatial formulas)
  std::vector<double> upper_temporal_production;  // per cell, interface n+1/2
  std::vector<double> spatial_interface_production;  // per interface j-1/2, j=0..N
  double temporal_production = 0.0;  // sum_j of temporal shares * dx
  double spatial_production = 0.0;   // sum_j of spatial shares * dx
  double max_cell_residual = 0.0;    // max_j |R_j^n|
  double total_U = 0.0;              // sum_j U_j^{n+1/2} dx
  double total_rhoS = 0.0;           // -(gamma - 1) * total_U
  Vec3 conserved_totals{};           // sum_j u_j^{n+1/2} dx
};

struct EntropyBudget {
  std::vector<SlabBudget> slabs;
  double initial_total_U = 0.0;   // sum_j U_j^{-1/2} dx (interface convention)
  double initial_data_U = 0.0;    // sum_j U(u_init) dx
  double initial_interface_production = 0.0;  // initial_data_U - initial_total_U
  Vec3 initial_conserved_totals{};

  double max_abs_residual() const {
    double m = 0.0;
    for (const auto& s : slabs) m = std::max(m, s.max_cell_residual);
    return m;
  }

  double max_signed_residual() const {
    double m = -INFINITY;
    for (const auto& s : slabs)
      for (double r : s.cell_residual) m = std::max(m, r);
    return m;
  }

  /// max over cells of |R + E_formula| / max(1, |E_formula|).
  double max_formula_mismatch() const {
    double m = 0.0;
    for (const auto& s : slabs)
      for (std::size_t j = 0; j < s.cell_residual.size(); ++j) {
        const double e = s.formula_production[j];
        m = std::max(m, std::fabs(s.cell_residual[j] + e) / std::max(1.0, std::fabs(e)));
      }
    return m;
  }
};

namespace detail {

struct TemporalInterfaceData {
  std::vector<Vec3> flux;
  std::vector<double> entropy_flux;
  std::vector<double> production;  // attributed to cells (zero at boundaries)
  std::vector<double> formula;     // dv^T M dv
  std::vector<Vec3> jump;
  std::vector<SymMatrix3> matrix;
};

inline TemporalInterfaceData temporal_interface(const Trajectory& traj, const Scheme& scheme,
                                                const std::vector<std::vector<CellState>>& cells,
                                                const std::vector<CellState>& initial, int i) {
  const int n = traj.grid.n_cells;
  const int n_slabs = static_cast<int>(traj.slabs.size());
  TemporalInterfaceData d;
  d.flux.resize(n);
  d.entropy_flux.resize(n);
  d.production.assign(n, 0.0);
  d.formula.assign(n, 0.0);
  d.jump.assign(n, Vec3{});
  d.matrix.assign(n, SymMatrix3{});
  const TemporalRole role = traj.role(i);
  for (int j = 0; j < n; ++j) {
    if (role == TemporalRole::InitialData) {
      const CellState& above = cells[0][j];
      d.flux[j] = initial[j].u.vec();
      d.entropy_flux[j] = dot(above.v.vec(), d.flux[j]) - flux_potentials(above.w).phi;
      continue;
    }
    if (role == TemporalRole::Final) {
      const CellState& below = cells[n_slabs - 1][j];
      d.flux[j] = below.u.vec();
      d.entropy_flux[j] = entropy_pair(below.w, scheme.gas()).U;
      continue;
    }
    const CellState& past = cells[i - 1][j];
    const CellState& future = cells[i][j];
    d.flux[j] = role == TemporalRole::Causal ? past.u.vec() : scheme.temporal_flux(past, future);
    const Vec3 dv = future.v.vec() - past.v.vec();
    const double phi_p = flux_potentials(past.w).phi;
    const double phi_f = flux_potentials(future.w).phi;
    d.entropy_flux[j] = dot(mean_entropy_vars(past.v, future.v).vec(), d.flux[j]) -
                        0.5 * (phi_p + phi_f);
    d.production[j] = (phi_f - phi_p) - dot(dv, d.flux[j]);
    d.jump[j] = dv;
    d.matrix[j] = role == TemporalRole::Causal ? scheme.upwind_dissipation(past, future)
                                               : scheme.temporal_dissipation(past, future);
    d.formula[j] = d.matrix[j].quadratic_form(dv);
  }
  return d;
}

}  // namespace detail

/// Entropy balance of every slab of a solved trajectory.
inline EntropyBudget entropy_budget(const Trajectory& traj, const Scheme& scheme) {
  const SpaceTimeGrid& grid = traj.grid;
  const GasParams& g = scheme.gas();
  const int n = grid.n_cells;
  const int n_slabs = static_cast<int>(traj.slabs.size());
  const double lambda = grid.lambda();

  std::vector<std::vector<CellState>> cells(n_slabs);
  for (int s = 0; s < n_slabs; ++s) cells[s] = detail::make_cells(traj.slabs[s].cells, g, s);
  const auto initial = detail::make_cells(traj.initial, g, -1);

  EntropyBudget budget;
  auto lower = detail::temporal_interface(traj, scheme, cells, initial, 0);
  for (int j = 0; j < n; ++j) {
    budget.initial_total_U += lower.entropy_flux[j] * grid.dx;
    budget.initial_data_U += entropy_pair(initial[j].w, g).U * grid.dx;
    budget.initial_conserved_totals += grid.dx * initial[j].u.vec();
  }
  budget.initial_interface_production = budget.initial_data_U - budget.initial_total_U;

  for (int s = 0; s < n_slabs; ++s) {
    auto upper = detail::temporal_interface(traj, scheme, cells, initial, s + 1);
    const auto& cs = cells[s];
    const auto f = detail::spatial_fluxes(cs, scheme, grid.boundary);

    // Spatial interface i lies between cells i-1 and i (wrapping if periodic).
    std::vector<double> F(n + 1), prod(n + 1), formula(n + 1);
    std::vector<Vec3> jump(n + 1);
    std::vector<SymMatrix3> Q(n + 1);
    for (int i = 0; i <= n; ++i) {
      const CellState* L;
      const CellState* R;
      if (i == 0 || i == n) {
        if (grid.boundary == Boundary::Periodic) {
          L = &cs[n - 1];
          R = &cs[0];
        } else {
          L = R = (i == 0) ? &cs[0] : &cs[n - 1];
        }
      } else {
        L = &cs[i - 1];
        R = &cs[i];
      }
      const Vec3 dv = R->v.vec() - L->v.vec();
      const double psiL = flux_potentials(L->w).psi;
      const double psiR = flux_potentials(R->w).psi;
      F[i] = dot(mean_entropy_vars(L->v, R->v).vec(), f[i]) - 0.5 * (psiL + psiR);
      prod[i] = (psiR - psiL) - dot(dv, f[i]);
      jump[i] = dv;
      Q[i] = scheme.spatial_dissipation(*L, *R);
      formula[i] = Q[i].quadratic_form(dv);
    }

    SlabBudget b;
    b.slab = s;
    b.t = (s + 1) * grid.dt;
    b.cell_residual.resize(n);
    b.measured_production.resize(n);
    b.formula_production.resize(n);
    b.upper_temporal_production = upper.production;
    b.spatial_interface_production = prod;
    for (int j = 0; j < n; ++j) {
      b.cell_residual[j] =
          (upper.entropy_flux[j] - lower.entropy_flux[j]) + lambda * (F[j + 1] - F[j]);
      const double temporal = 0.5 * (upper.production[j] + lower.production[j]);
      const double spatial = 0.5 * lambda * (prod[j + 1] + prod[j]);
      b.measured_production[j] = temporal + spatial;
      b.formula_production[j] =
          grid.dt * (entropy_production_time(lower.jump[j], upper.jump[j], lower.matrix[j],
                                             upper.matrix[j], grid.dt) +
                     entropy_production_space(jump[j], jump[j + 1], Q[j], Q[j + 1], grid.dx));
      b.temporal_production += temporal * grid.dx;
      b.spatial_production += spatial * grid.dx;
      b.max_cell_residual = std::max(b.max_cell_residual, std::fabs(b.cell_residual[j]));
      b.total_U += upper.entropy_flux[j] * grid.dx;
      b.conserved_totals += grid.dx * upper.flux[j];
    }
    b.total_rhoS = -(g.gamma - 1.0) * b.total_U;
    budget.slabs.push_back(std::move(b));
    lower = std::move(upper);
  }
  return budget;
}

/// Entropy balance of a single slab. Only slabs up to slab + 1 are read.
inline SlabBudget slab_entropy_balance(const Trajectory& traj, const Scheme& scheme, int slab) {
  Trajectory slice;
  slice.grid = traj.grid;
  slice.initial = traj.initial;
  const int last = std::min<int>(slab + 2, static_cast<int>(traj.slabs.size()));
  slice.slabs.assign(traj.slabs.begin(), traj.slabs.begin() + last);
  for (int b : traj.block_starts)
    if (b < last) slice.block_starts.push_back(b);
  return entropy_budget(slice, scheme).slabs.at(slab);
}

/// Sum_j U_j dx at every temporal interface, starting with the initial one.
inline std::vector<double> global_entropy_series(const EntropyBudget& budget) {
  std::vector<double> out{budget.initial_total_U};
  for (const auto& s : budget.slabs) out.push_back(s.total_U);
  return out;
}

}  // namespace stfv
