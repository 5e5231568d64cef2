/// Space-time finite-volume solver for the 1D Euler equations.
///
/// Each cell (j, n) satisfies
///   [u_j^{n+1/2} - u_j^{n-1/2}] + lambda [f_{j+1/2}^n - f_{j-1/2}^n] = 0,
/// where u^{n+1/2} is the temporal interface flux. Slabs are grouped into
/// blocks that are solved together by Newton's method; the temporal flux is
/// upwind (causal) at block ends and the configured flux inside a block.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "stfv/scheme.hpp"

namespace stfv {

enum class Boundary { Periodic, Transmissive };

inline std::string_view to_string(Boundary b) {
  return b == Boundary::Periodic ? "periodic" : "transmissive";
}

struct SpaceTimeGrid {
  int n_cells = 100;
  double dx = 0.01;
  double dt = 0.005;
  int n_slabs = 1;
  Boundary boundary = Boundary::Periodic;
  double x_left = 0.0;

  double lambda() const { return dt / dx; }
  double cell_center(int j) const { return x_left + (j + 0.5) * dx; }
};

inline void validate(const SpaceTimeGrid& g) {
  if (g.n_cells < 3) throw DomainError("grid needs at least 3 cells");
  if (!(g.dx > 0.0) || !(g.dt > 0.0)) throw DomainError("dx and dt must be positive");
  if (g.n_slabs < 1) throw DomainError("grid needs at least one slab");
}

using SlabStates = std::vector<ConsState>;

struct NewtonDiagnostics {
  int iterations = 0;
  double initial_residual = 0.0;
  double final_residual = 0.0;
  int rejected_steps = 0;
  int continuation_stages = 0;  // 0 when the direct solve converged
};

struct SlabSolution {
  SlabStates cells;
  NewtonDiagnostics newton;  // shared by all slabs of a coupled block
};

struct CouplingMode {
  enum class Kind { CausalSequential, BlockCoupled, FullyCoupled };

  Kind kind = Kind::CausalSequential;
  int block_size = 1;

  static CouplingMode causal() { return {Kind::CausalSequential, 1}; }
  static CouplingMode block(int k) {
    if (k < 1) throw DomainError("block size must be at least 1");
    return {Kind::BlockCoupled, k};
  }
  static CouplingMode full() { return {Kind::FullyCoupled, 0}; }

  int block_length(int n_slabs) const {
    switch (kind) {
      case Kind::CausalSequential: return 1;
      case Kind::BlockCoupled: return block_size;
      case Kind::FullyCoupled: return n_slabs;
    }
    return 1;
  }
};

inline std::string_view to_string(CouplingMode::Kind k) {
  switch (k) {
    case CouplingMode::Kind::CausalSequential: return "causal";
    case CouplingMode::Kind::BlockCoupled: return "block";
    case CouplingMode::Kind::FullyCoupled: return "full";
  }
  return "unknown";
}

/// Role of a temporal interface. Interface i sits below slab i, so i = 0 is
/// the initial-data interface and i = n_slabs the final one.
enum class TemporalRole { InitialData, Causal, Coupled, Final };

struct Trajectory {
  SpaceTimeGrid grid;
  SlabStates initial;
  std::vector<SlabSolution> slabs;
  std::vector<int> block_starts;

  TemporalRole role(int interface) const {
    if (interface == 0) return TemporalRole::InitialData;
    if (interface == static_cast<int>(slabs.size())) return TemporalRole::Final;
    return std::binary_search(block_starts.begin(), block_starts.end(), interface)
               ? TemporalRole::Causal
               : TemporalRole::Coupled;
  }
};

inline double max_wave_speed(const SlabStates& cells, const GasParams& g) {
  double s = 0.0;
  for (const auto& c : cells) {
    const PrimState w = cons_to_prim(c, g);
    s = std::max(s, std::fabs(w.u) + sound_speed(w, g));
  }
  return s;
}

namespace detail {

inline std::vector<CellState> make_cells(std::span<const ConsState> states,
                                         const GasParams& g, int slab) {
  std::vector<CellState> cells;
  cells.reserve(states.size());
  for (std::size_t j = 0; j < states.size(); ++j) {
    try {
      cells.push_back(make_cell(states[j], g));
    } catch (const InvalidStateError& e) {
      throw InvalidStateError(e.rho(), e.pressure(),
                              "slab " + std::to_string(slab) + " cell " +
                                  std::to_string(j));
    }
  }
  return cells;
}

/// Spatial interface fluxes; entry i lies between cells i-1 and i.
inline std::vector<Vec3> spatial_fluxes(const std::vector<CellState>& cells,
                                        const Scheme& scheme, Boundary boundary) {
  const std::size_t n = cells.size();
  std::vector<Vec3> f(n + 1);
  for (std::size_t i = 1; i < n; ++i) f[i] = scheme.spatial_flux(cells[i - 1], cells[i]);
  if (boundary == Boundary::Periodic) {
    f[0] = f[n] = scheme.spatial_flux(cells[n - 1], cells[0]);
  } else {
    f[0] = scheme.spatial_flux(cells[0], cells[0]);
    f[n] = scheme.spatial_flux(cells[n - 1], cells[n - 1]);
  }
  return f;
}

inline void add_cell_residuals(std::span<const Vec3> lower, std::span<const Vec3> upper,
                               const std::vector<Vec3>& f, double lambda,
                               std::span<Vec3> out) {
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = (upper[j] - lower[j]) + lambda * (f[j + 1] - f[j]);
  }
}

}  // namespace detail

/// How the lower temporal interface of a slab is treated.
enum class LowerInterface { Causal, Coupled };

/// Per-cell residuals of one slab. The upper interface is upwind when
/// `next` is absent; the lower one couples `prev` and `cur` only when asked.
inline std::vector<Vec3> slab_residual(const SlabStates& prev, const SlabStates& cur,
                                       const SlabStates* next, const Scheme& scheme,
                                       const SpaceTimeGrid& grid,
                                       LowerInterface lower_mode = LowerInterface::Causal,
                                       int slab = 0) {
  const GasParams& g = scheme.gas();
  const auto pc = detail::make_cells(prev, g, slab - 1);
  const auto cc = detail::make_cells(cur, g, slab);
  const std::size_t n = cur.size();
  std::vector<Vec3> lower(n), upper(n), out(n);
  for (std::size_t j = 0; j < n; ++j) {
    lower[j] = lower_mode == LowerInterface::Coupled ? scheme.temporal_flux(pc[j], cc[j])
                                                     : pc[j].u.vec();
  }
  if (next != nullptr) {
    const auto nc = detail::make_cells(*next, g, slab + 1);
    for (std::size_t j = 0; j < n; ++j) upper[j] = scheme.temporal_flux(cc[j], nc[j]);
  } else {
    for (std::size_t j = 0; j < n; ++j) upper[j] = cc[j].u.vec();
  }
  detail::add_cell_residuals(lower, upper, detail::spatial_fluxes(cc, scheme, grid.boundary),
                             grid.lambda(), out);
  return out;
}

/// Nonlinear system of one block of coupled slabs above a known past slab.
/// Unknowns are ordered (slab, cell, component).
class BlockSystem {
 public:
  BlockSystem(const Scheme& scheme, const SpaceTimeGrid& grid, const SlabStates& past,
              int n_block_slabs, int first_slab)
      : scheme_(scheme),
        grid_(grid),
        past_(past),
        k_(n_block_slabs),
        n_(static_cast<int>(past.size())),
        first_slab_(first_slab) {
    build_coloring();
  }

  int size() const { return 3 * n_ * k_; }
  int cells() const { return n_ * k_; }

  /// Residual at x; throws InvalidStateError if any unknown is inadmissible.
  void residual(const Eigen::VectorXd& x, Eigen::VectorXd& r) const {
    const GasParams& g = scheme_.gas();
    std::vector<std::vector<CellState>> cells(k_);
    for (int s = 0; s < k_; ++s) cells[s] = detail::make_cells(slab_view(x, s), g, first_slab_ + s);
    r.resize(size());
    std::vector<Vec3> lower(n_), upper(n_), out(n_);
    for (int j = 0; j < n_; ++j) lower[j] = past_[j].vec();
    for (int s = 0; s < k_; ++s) {
      if (s + 1 < k_) {
        for (int j = 0; j < n_; ++j) upper[j] = scheme_.temporal_flux(cells[s][j], cells[s + 1][j]);
      } else {
        for (int j = 0; j < n_; ++j) upper[j] = cells[s][j].u.vec();
      }
      detail::add_cell_residuals(lower, upper,
                                 detail::spatial_fluxes(cells[s], scheme_, grid_.boundary),
                                 grid_.lambda(), out);
      for (int j = 0; j < n_; ++j)
        for (int c = 0; c < 3; ++c) r[3 * (s * n_ + j) + c] = out[j][c];
      std::swap(lower, upper);
    }
  }

  /// Forward-difference Jacobian using a distance-2 coloring of the stencil.
  Eigen::SparseMatrix<double> jacobian(const Eigen::VectorXd& x, const Eigen::VectorXd& r) const {
    const double sqrt_eps = std::sqrt(std::numeric_limits<double>::epsilon());
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(size()) * 15);
    Eigen::VectorXd xp(size());
    Eigen::VectorXd rp(size());
    std::vector<double> step(cells());
    for (int color = 0; color < n_colors_; ++color) {
      for (int comp = 0; comp < 3; ++comp) {
        bool ok = false;
        for (double sign : {1.0, -1.0}) {
          xp = x;
          for (int cell : color_members_[color]) {
            const int idx = 3 * cell + comp;
            const double h = sign * sqrt_eps * std::max(std::fabs(x[idx]), 1.0);
            xp[idx] = x[idx] + h;
            step[cell] = xp[idx] - x[idx];
          }
          try {
            residual(xp, rp);
            ok = true;
            break;
          } catch (const InvalidStateError&) {
          }
        }
        if (!ok) {
          throw SolverError("finite-difference perturbation left the admissible set",
                            first_slab_, 0, r.cwiseAbs().maxCoeff());
        }
        for (int cell : color_members_[color]) {
          for (int row_cell : stencil_[cell]) {
            for (int i = 0; i < 3; ++i) {
              const int row = 3 * row_cell + i;
              // Zeros are kept so the sparsity pattern is fixed across iterations.
              triplets.emplace_back(row, 3 * cell + comp, (rp[row] - r[row]) / step[cell]);
            }
          }
        }
      }
    }
    Eigen::SparseMatrix<double> J(size(), size());
    J.setFromTriplets(triplets.begin(), triplets.end());
    return J;
  }

  int n_colors() const { return n_colors_; }

 private:
  SlabStates slab_view(const Eigen::VectorXd& x, int s) const {
    SlabStates out(n_);
    for (int j = 0; j < n_; ++j) {
      const int b = 3 * (s * n_ + j);
      out[j] = {x[b], x[b + 1], x[b + 2]};
    }
    return out;
  }

  // Cells whose residual depends on cell c (the stencil is symmetric).
  std::vector<int> neighbours(int c) const {
    const int s = c / n_;
    const int j = c % n_;
    std::vector<int> out{c};
    if (grid_.boundary == Boundary::Periodic) {
      out.push_back(s * n_ + (j + n_ - 1) % n_);
      out.push_back(s * n_ + (j + 1) % n_);
    } else {
      if (j > 0) out.push_back(c - 1);
      if (j + 1 < n_) out.push_back(c + 1);
    }
    if (s > 0) out.push_back(c - n_);
    if (s + 1 < k_) out.push_back(c + n_);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  void build_coloring() {
    stencil_.resize(cells());
    for (int c = 0; c < cells(); ++c) stencil_[c] = neighbours(c);
    std::vector<int> color(cells(), -1);
    n_colors_ = 0;
    std::vector<char> used;
    for (int c = 0; c < cells(); ++c) {
      used.assign(n_colors_ + 1, 0);
      for (int a : stencil_[c])
        for (int b : stencil_[a])
          if (color[b] >= 0) used[color[b]] = 1;
      int k = 0;
      while (used[k]) ++k;
      color[c] = k;
      n_colors_ = std::max(n_colors_, k + 1);
    }
    color_members_.assign(n_colors_, {});
    for (int c = 0; c < cells(); ++c) color_members_[color[c]].push_back(c);
  }

  const Scheme& scheme_;
  const SpaceTimeGrid& grid_;
  const SlabStates& past_;
  int k_;
  int n_;
  int first_slab_;
  std::vector<std::vector<int>> stencil_;
  std::vector<std::vector<int>> color_members_;
  int n_colors_ = 0;
};

namespace detail {

/// Damped Newton iteration on `sys` starting from `x`, which is overwritten
/// with the solution. Accumulates into `diag`.
inline void newton_iterate(const BlockSystem& sys, Eigen::VectorXd& x, const NewtonSettings& ns,
                           int first_slab, NewtonDiagnostics& diag) {
  Eigen::VectorXd r(sys.size());
  try {
    sys.residual(x, r);
  } catch (const InvalidStateError& e) {
    throw SolverError(std::string("invalid initial guess: ") + e.what(), first_slab, 0, NAN);
  }
  double norm = r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
  diag.initial_residual = norm;
  const double tol = std::max(ns.abs_tol, ns.rel_tol * norm);

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  bool pattern_ready = false;
  Eigen::VectorXd x_try(sys.size());
  Eigen::VectorXd r_try(sys.size());
  int iterations = 0;
  while (norm > tol) {
    if (iterations >= ns.max_iterations) {
      throw SolverError("Newton did not converge", first_slab, iterations, norm);
    }
    const Eigen::SparseMatrix<double> J = sys.jacobian(x, r);
    if (!pattern_ready) {
      lu.analyzePattern(J);
      pattern_ready = true;
    }
    lu.factorize(J);
    if (lu.info() != Eigen::Success) {
      throw SolverError("singular Newton Jacobian", first_slab, iterations, norm);
    }
    const Eigen::VectorXd delta = lu.solve(-r);
    double step = ns.damping;
    bool accepted = false;
    for (int h = 0; h <= ns.max_halvings; ++h, step *= 0.5) {
      x_try = x + step * delta;
      try {
        sys.residual(x_try, r_try);
      } catch (const InvalidStateError&) {
        ++diag.rejected_steps;
        continue;
      }
      const double norm_try = r_try.cwiseAbs().maxCoeff();
      if (norm_try < norm || norm_try <= tol) {
        x.swap(x_try);
        r.swap(r_try);
        norm = norm_try;
        accepted = true;
        break;
      }
      ++diag.rejected_steps;
    }
    ++iterations;
    ++diag.iterations;
    if (!accepted) {
      throw SolverError("line search found no admissible decreasing step", first_slab,
                        iterations, norm);
    }
  }
  diag.final_residual = norm;
}

inline constexpr double kContinuationFirstFraction = 0.125;
inline constexpr double kContinuationMinIncrement = 1.0 / 1024.0;

}  // namespace detail

/// Damped Newton solve of a block of `n_block_slabs` coupled slabs. Upwind
/// temporal fluxes are used at both block ends. The initial guess defaults to
/// `past` repeated in every slab.
///
/// If Newton fails from the initial guess, the block is re-solved by
/// continuation in the time step: the system with dt scaled by s is solved
/// for s increasing from 1/8 to 1, each stage started from the previous
/// solution, and the increment in s is halved after a failed stage. If that
/// also fails, the error of the direct attempt is rethrown.
inline std::vector<SlabSolution> solve_block(const SlabStates& past, int n_block_slabs,
                                             const Scheme& scheme, const SpaceTimeGrid& grid,
                                             int first_slab = 0,
                                             const std::vector<SlabStates>* guess = nullptr) {
  if (n_block_slabs < 1) throw DomainError("block must contain at least one slab");
  if (static_cast<int>(past.size()) != grid.n_cells) {
    throw DomainError("past slab size does not match the grid");
  }
  const NewtonSettings& ns = scheme.config().newton;
  const int n = grid.n_cells;
  const BlockSystem sys(scheme, grid, past, n_block_slabs, first_slab);

  Eigen::VectorXd x0(sys.size());
  for (int s = 0; s < n_block_slabs; ++s) {
    const SlabStates& src = guess != nullptr ? (*guess)[s] : past;
    for (int j = 0; j < n; ++j)
      for (int c = 0; c < 3; ++c) x0[3 * (s * n + j) + c] = src[j].vec()[c];
  }

  NewtonDiagnostics diag;
  Eigen::VectorXd x = x0;
  try {
    detail::newton_iterate(sys, x, ns, first_slab, diag);
  } catch (const SolverError& direct) {
    if (std::isnan(direct.residual())) throw;  // the initial guess itself is invalid
    NewtonDiagnostics cont;
    Eigen::VectorXd xc = x0;
    double s_done = 0.0;
    double increment = detail::kContinuationFirstFraction;
    bool solved = false;
    while (increment >= detail::kContinuationMinIncrement) {
      const double s_next = std::min(1.0, s_done + increment);
      SpaceTimeGrid scaled = grid;
      scaled.dt = grid.dt * s_next;
      const BlockSystem stage(scheme, scaled, past, n_block_slabs, first_slab);
      Eigen::VectorXd xs = xc;
      NewtonDiagnostics d;
      try {
        detail::newton_iterate(stage, xs, ns, first_slab, d);
      } catch (const SolverError&) {
        cont.iterations += d.iterations;
        cont.rejected_steps += d.rejected_steps;
        increment *= 0.5;
        continue;
      }
      cont.iterations += d.iterations;
      cont.rejected_steps += d.rejected_steps;
      ++cont.continuation_stages;
      xc.swap(xs);
      s_done = s_next;
      if (s_done == 1.0) {
        solved = true;
        cont.final_residual = d.final_residual;
        break;
      }
      increment *= 2.0;
    }
    if (!solved) throw;
    cont.initial_residual = diag.initial_residual;
    cont.iterations += diag.iterations;
    cont.rejected_steps += diag.rejected_steps;
    diag = cont;
    x.swap(xc);
  }

  std::vector<SlabSolution> out(n_block_slabs);
  for (int s = 0; s < n_block_slabs; ++s) {
    out[s].cells.resize(n);
    for (int j = 0; j < n; ++j) {
      const int b = 3 * (s * n + j);
      out[s].cells[j] = {x[b], x[b + 1], x[b + 2]};
    }
    out[s].newton = diag;
  }
  return out;
}

/// Causal solve of a single slab above `prev`.
inline SlabSolution newton_solve_slab(const SlabStates& prev, const Scheme& scheme,
                                      const SpaceTimeGrid& grid, int slab = 0,
                                      const SlabStates* guess = nullptr) {
  std::vector<SlabStates> g;
  if (guess != nullptr) g.push_back(*guess);
  return solve_block(prev, 1, scheme, grid, slab, guess != nullptr ? &g : nullptr)
      .front();
}

/// March the whole run block by block.
inline Trajectory march(const SlabStates& initial, const Scheme& scheme,
                        const SpaceTimeGrid& grid, CouplingMode mode) {
  validate(grid);
  if (static_cast<int>(initial.size()) != grid.n_cells) {
    throw DomainError("initial data size does not match the grid");
  }
  detail::make_cells(initial, scheme.gas(), -1);
  Trajectory traj;
  traj.grid = grid;
  traj.initial = initial;
  traj.slabs.reserve(grid.n_slabs);
  const int block = mode.block_length(grid.n_slabs);
  for (int start = 0; start < grid.n_slabs; start += block) {
    const int k = std::min(block, grid.n_slabs - start);
    const SlabStates& past = start == 0 ? initial : traj.slabs.back().cells;
    auto solved = solve_block(past, k, scheme, grid, start);
    traj.block_starts.push_back(start);
    for (auto& s : solved) traj.slabs.push_back(std::move(s));
  }
  return traj;
}

}  // namespace stfv
