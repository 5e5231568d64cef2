/// Verification problems: presets, the exact Riemann solution used as an
/// oracle, error norms and the Toro 123 overheating metric.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stfv/spacetime_solver.hpp"

namespace stfv {

struct RiemannIC {
  PrimState left;
  PrimState right;
  double x0 = 0.5;
};

/// Star-region values of the exact Riemann solution.
struct RiemannStar {
  double p = 0.0;
  double u = 0.0;
  double rho_left = 0.0;
  double rho_right = 0.0;
};

namespace detail {

// Pressure function f_K(p) and its derivative for one side.
inline std::pair<double, double> pressure_function(double p, const PrimState& s,
                                                   const GasParams& g) {
  const double gam = g.gamma;
  const double a = sound_speed(s, g);
  if (p > s.p) {
    const double A = 2.0 / ((gam + 1.0) * s.rho);
    const double B = (gam - 1.0) / (gam + 1.0) * s.p;
    const double q = std::sqrt(A / (p + B));
    return {(p - s.p) * q, q * (1.0 - 0.5 * (p - s.p) / (p + B))};
  }
  const double r = p / s.p;
  const double z = (gam - 1.0) / (2.0 * gam);
  return {2.0 * a / (gam - 1.0) * (std::pow(r, z) - 1.0),
          std::pow(r, -(gam + 1.0) / (2.0 * gam)) / (s.rho * a)};
}

}  // namespace detail

/// Star state by Newton iteration on the pressure function.
inline RiemannStar riemann_star(const PrimState& L, const PrimState& R, const GasParams& g) {
  require_admissible(L, "riemann_star");
  require_admissible(R, "riemann_star");
  const double gam = g.gamma;
  const double aL = sound_speed(L, g);
  const double aR = sound_speed(R, g);
  const double du = R.u - L.u;
  if (2.0 * (aL + aR) / (gam - 1.0) <= du) {
    throw VacuumError("Riemann data generate a vacuum");
  }
  // Two-rarefaction estimate, exact when both waves are rarefactions.
  const double z = (gam - 1.0) / (2.0 * gam);
  double p = std::pow((aL + aR - 0.5 * (gam - 1.0) * du) /
                          (aL / std::pow(L.p, z) + aR / std::pow(R.p, z)),
                      1.0 / z);
  for (int iter = 0; iter < 100; ++iter) {
    const auto [fL, dL] = detail::pressure_function(p, L, g);
    const auto [fR, dR] = detail::pressure_function(p, R, g);
    const double p_new = std::max(p - (fL + fR + du) / (dL + dR), 1e-3 * p);
    const double change = std::fabs(p_new - p) / (0.5 * (p_new + p));
    p = p_new;
    if (change < 1e-15) break;
  }
  const auto [fL, dL] = detail::pressure_function(p, L, g);
  const auto [fR, dR] = detail::pressure_function(p, R, g);
  RiemannStar star;
  star.p = p;
  star.u = 0.5 * (L.u + R.u) + 0.5 * (fR - fL);
  const double gr = (gam - 1.0) / (gam + 1.0);
  auto star_density = [&](const PrimState& s) {
    const double r = p / s.p;
    if (p > s.p) return s.rho * (r + gr) / (gr * r + 1.0);
    return s.rho * std::pow(r, 1.0 / gam);
  };
  star.rho_left = star_density(L);
  star.rho_right = star_density(R);
  return star;
}

/// Exact solution of the Riemann problem at similarity coordinate xi = x/t.
inline PrimState exact_riemann(const PrimState& L, const PrimState& R, double xi,
                               const GasParams& g) {
  const RiemannStar star = riemann_star(L, R, g);
  const double gam = g.gamma;
  const double g1 = (gam - 1.0) / (gam + 1.0);
  const double g2 = 2.0 / (gam + 1.0);
  if (xi <= star.u) {
    const double aL = sound_speed(L, g);
    if (star.p > L.p) {
      const double sL = L.u - aL * std::sqrt((gam + 1.0) / (2.0 * gam) * star.p / L.p +
                                             (gam - 1.0) / (2.0 * gam));
      return xi <= sL ? L : PrimState{star.rho_left, star.u, star.p};
    }
    const double head = L.u - aL;
    const double a_star = aL * std::pow(star.p / L.p, (gam - 1.0) / (2.0 * gam));
    const double tail = star.u - a_star;
    if (xi <= head) return L;
    if (xi >= tail) return {star.rho_left, star.u, star.p};
    const double c = g2 + g1 / aL * (L.u - xi);
    const double rho = L.rho * std::pow(c, 2.0 / (gam - 1.0));
    return {rho, g2 * (aL + 0.5 * (gam - 1.0) * L.u + xi),
            L.p * std::pow(c, 2.0 * gam / (gam - 1.0))};
  }
  const double aR = sound_speed(R, g);
  if (star.p > R.p) {
    const double sR = R.u + aR * std::sqrt((gam + 1.0) / (2.0 * gam) * star.p / R.p +
                                           (gam - 1.0) / (2.0 * gam));
    return xi >= sR ? R : PrimState{star.rho_right, star.u, star.p};
  }
  const double head = R.u + aR;
  const double a_star = aR * std::pow(star.p / R.p, (gam - 1.0) / (2.0 * gam));
  const double tail = star.u + a_star;
  if (xi >= head) return R;
  if (xi <= tail) return {star.rho_right, star.u, star.p};
  const double c = g2 - g1 / aR * (R.u - xi);
  const double rho = R.rho * std::pow(c, 2.0 / (gam - 1.0));
  return {rho, g2 * (-aR + 0.5 * (gam - 1.0) * R.u + xi),
          R.p * std::pow(c, 2.0 * gam / (gam - 1.0))};
}

enum class Preset { Toro123, Sod, DensityWave, Constant };

inline constexpr std::array<Preset, 4> kAllPresets{Preset::Toro123, Preset::Sod,
                                                   Preset::DensityWave, Preset::Constant};

inline std::string_view to_string(Preset p) {
  switch (p) {
    case Preset::Toro123: return "toro123";
    case Preset::Sod: return "sod";
    case Preset::DensityWave: return "density_wave";
    case Preset::Constant: return "constant";
  }
  return "unknown";
}

inline std::optional<Preset> parse_preset(std::string_view name) {
  for (Preset p : kAllPresets)
    if (to_string(p) == name) return p;
  return std::nullopt;
}

/// A fully specified initial-value problem with an optional exact solution.
struct Problem {
  enum class Kind { Riemann, DensityWave, Constant };

  Kind kind = Kind::Constant;
  std::string name;
  double x_left = 0.0;
  double x_right = 1.0;
  double t_final = 1.0;
  Boundary boundary = Boundary::Periodic;
  GasParams gas;
  RiemannIC riemann;                 // Kind::Riemann
  double wave_amplitude = 0.2;       // Kind::DensityWave
  PrimState constant{1.0, 0.0, 1.0}; // Kind::Constant

  PrimState initial(double x) const {
    switch (kind) {
      case Kind::Riemann: return x < riemann.x0 ? riemann.left : riemann.right;
      case Kind::DensityWave:
        return {1.0 + wave_amplitude * std::sin(2.0 * std::numbers::pi * (x - x_left) /
                                                (x_right - x_left)),
                1.0, 1.0};
      case Kind::Constant: return constant;
    }
    return constant;
  }

  /// Exact solution at (x, t). Riemann solutions are only valid before the
  /// waves reach a boundary.
  PrimState exact(double x, double t) const {
    switch (kind) {
      case Kind::Riemann:
        if (t <= 0.0) return initial(x);
        return exact_riemann(riemann.left, riemann.right, (x - riemann.x0) / t, gas);
      case Kind::DensityWave: {
        const double len = x_right - x_left;
        double s = std::fmod(x - t - x_left, len);
        if (s < 0.0) s += len;
        return initial(x_left + s);
      }
      case Kind::Constant: return constant;
    }
    return constant;
  }
};

inline Problem make_preset(Preset p) {
  Problem pr;
  pr.name = std::string(to_string(p));
  switch (p) {
    case Preset::Toro123:
      pr.kind = Problem::Kind::Riemann;
      pr.riemann = {{1.0, -2.0, 0.4}, {1.0, 2.0, 0.4}, 0.5};
      pr.t_final = 0.15;
      pr.boundary = Boundary::Transmissive;
      break;
    case Preset::Sod:
      pr.kind = Problem::Kind::Riemann;
      pr.riemann = {{1.0, 0.0, 1.0}, {0.125, 0.0, 0.1}, 0.5};
      pr.t_final = 0.2;
      pr.boundary = Boundary::Transmissive;
      break;
    case Preset::DensityWave:
      pr.kind = Problem::Kind::DensityWave;
      pr.t_final = 1.0;
      pr.boundary = Boundary::Periodic;
      break;
    case Preset::Constant:
      pr.kind = Problem::Kind::Constant;
      pr.t_final = 1.0;
      pr.boundary = Boundary::Periodic;
      break;
  }
  return pr;
}

/// Cell means by midpoint sampling.
inline SlabStates cell_means(const Problem& pr, const SpaceTimeGrid& grid) {
  SlabStates out(grid.n_cells);
  for (int j = 0; j < grid.n_cells; ++j)
    out[j] = prim_to_cons(pr.initial(grid.cell_center(j)), pr.gas);
  return out;
}

/// Grid spanning the problem's domain with n_cells cells.
inline SpaceTimeGrid make_grid(const Problem& pr, int n_cells, double dt, int n_slabs) {
  SpaceTimeGrid g;
  g.n_cells = n_cells;
  g.dx = (pr.x_right - pr.x_left) / n_cells;
  g.dt = dt;
  g.n_slabs = n_slabs;
  g.boundary = pr.boundary;
  g.x_left = pr.x_left;
  return g;
}

inline SlabStates preset_ic(Preset p, const SpaceTimeGrid& grid) {
  return cell_means(make_preset(p), grid);
}

/// Norms of (rho, u, p) errors at cell midpoints.
struct ErrorNorms {
  Vec3 l1{};
  Vec3 l2{};
  Vec3 linf{};
};

template <typename Oracle>
ErrorNorms error_norms(const SlabStates& cells, const SpaceTimeGrid& grid, Oracle&& exact,
                       const GasParams& g) {
  ErrorNorms n;
  for (int j = 0; j < grid.n_cells; ++j) {
    const PrimState w = cons_to_prim(cells[j], g);
    const PrimState e = exact(grid.cell_center(j));
    const Vec3 d{std::fabs(w.rho - e.rho), std::fabs(w.u - e.u), std::fabs(w.p - e.p)};
    for (int k = 0; k < 3; ++k) {
      n.l1[k] += d[k] * grid.dx;
      n.l2[k] += d[k] * d[k] * grid.dx;
      n.linf[k] = std::max(n.linf[k], d[k]);
    }
  }
  for (double& v : n.l2) v = std::sqrt(v);
  return n;
}

/// Relative internal-energy excess at the diaphragm of a Riemann problem:
/// (e_num - e_exact) / e_exact, e_num averaged over the two cells adjacent
/// to x0.
inline double overheating_metric(const SlabStates& cells, const SpaceTimeGrid& grid,
                                 const Problem& pr, double t) {
  if (pr.kind != Problem::Kind::Riemann) {
    throw DomainError("overheating metric needs a Riemann problem");
  }
  const int right = static_cast<int>(std::lround((pr.riemann.x0 - grid.x_left) / grid.dx));
  const int left = right - 1;
  if (left < 0 || right >= grid.n_cells) throw DomainError("diaphragm outside the grid");
  const double e_num = 0.5 * (internal_energy(cons_to_prim(cells[left], pr.gas), pr.gas) +
                              internal_energy(cons_to_prim(cells[right], pr.gas), pr.gas));
  const double e_exact = internal_energy(pr.exact(pr.riemann.x0, t), pr.gas);
  return (e_num - e_exact) / e_exact;
}

}  // namespace stfv
