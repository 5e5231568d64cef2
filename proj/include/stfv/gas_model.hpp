/// Perfect-gas thermodynamics for the 1D Euler equations: state conversions,
/// the entropy pair U = -rho S/(gamma-1), entropy variables, flux
/// potentials, z-variables and the averaging primitives used by the
/// entropy-conservative fluxes.
#pragma once

#include <array>
#include <cmath>
#include <utility>
#include <cstddef>
#include <string>

#include "stfv/errors.hpp"

namespace stfv {

/// Fixed-size 3-vector for fluxes, jumps and state components.
struct Vec3 : std::array<double, 3> {};

inline Vec3 operator+(const Vec3& a, const Vec3& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Vec3 operator-(const Vec3& a, const Vec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Vec3 operator*(double s, const Vec3& a) {
  return {s * a[0], s * a[1], s * a[2]};
}
inline Vec3& operator+=(Vec3& a, const Vec3& b) {
  for (std::size_t i = 0; i < 3; ++i) a[i] += b[i];
  return a;
}
inline double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline double norm2(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline double norm_inf(const Vec3& a) {
  return std::fmax(std::fabs(a[0]), std::fmax(std::fabs(a[1]), std::fabs(a[2])));
}

struct GasParams {
  double gamma = 1.4;
};

inline void validate(const GasParams& g) {
  if (!(g.gamma > 1.0)) {
    throw DomainError("gamma must exceed 1, got " + std::to_string(g.gamma));
  }
}

/// Conservative variables (rho, rho u, rho e^t) of one cell.
struct ConsState {
  double rho = 0.0;
  double mom = 0.0;
  double ener = 0.0;

  Vec3 vec() const { return {rho, mom, ener}; }
  static ConsState from(const Vec3& a) { return {a[0], a[1], a[2]}; }
  friend bool operator==(const ConsState&, const ConsState&) = default;
};

struct PrimState {
  double rho = 0.0;
  double u = 0.0;
  double p = 0.0;

  friend bool operator==(const PrimState&, const PrimState&) = default;
};

struct EntropyVars {
  double v1 = 0.0;
  double v2 = 0.0;
  double v3 = 0.0;

  Vec3 vec() const { return {v1, v2, v3}; }
  static EntropyVars from(const Vec3& a) { return {a[0], a[1], a[2]}; }
};

/// Algebraic variables z1 = sqrt(rho/p), z2 = z1 u, z3 = sqrt(rho p).
struct ZVars {
  double z1 = 0.0;
  double z2 = 0.0;
  double z3 = 0.0;
};

inline bool is_admissible(const PrimState& w) {
  return w.rho > 0.0 && w.p > 0.0 && std::isfinite(w.rho) &&
         std::isfinite(w.u) && std::isfinite(w.p);
}

inline void require_admissible(const PrimState& w, const char* context) {
  if (!is_admissible(w)) throw InvalidStateError(w.rho, w.p, context);
}

inline double pressure(const ConsState& u, const GasParams& g) {
  return (g.gamma - 1.0) * (u.ener - 0.5 * u.mom * u.mom / u.rho);
}

inline ConsState prim_to_cons(const PrimState& w, const GasParams& g) {
  require_admissible(w, "prim_to_cons");
  return {w.rho, w.rho * w.u,
          w.p / (g.gamma - 1.0) + 0.5 * w.rho * w.u * w.u};
}

inline PrimState cons_to_prim(const ConsState& u, const GasParams& g) {
  if (!(u.rho > 0.0)) throw InvalidStateError(u.rho, NAN, "cons_to_prim");
  PrimState w{u.rho, u.mom / u.rho, pressure(u, g)};
  require_admissible(w, "cons_to_prim");
  return w;
}

inline double sound_speed(const PrimState& w, const GasParams& g) {
  return std::sqrt(g.gamma * w.p / w.rho);
}

inline double internal_energy(const PrimState& w, const GasParams& g) {
  return w.p / ((g.gamma - 1.0) * w.rho);
}

inline double total_enthalpy(const PrimState& w, const GasParams& g) {
  const double a = sound_speed(w, g);
  return a * a / (g.gamma - 1.0) + 0.5 * w.u * w.u;
}

/// Euler flux (rho u, rho u^2 + p, rho u h^t).
inline Vec3 physical_flux(const PrimState& w, const GasParams& g) {
  require_admissible(w, "physical_flux");
  const double m = w.rho * w.u;
  return {m, m * w.u + w.p, m * total_enthalpy(w, g)};
}

/// S = ln p - gamma ln rho.
inline double specific_entropy(const PrimState& w, const GasParams& g) {
  return std::log(w.p) - g.gamma * std::log(w.rho);
}

struct EntropyPair {
  double U = 0.0;
  double F = 0.0;
};

inline EntropyPair entropy_pair(const PrimState& w, const GasParams& g) {
  require_admissible(w, "entropy_pair");
  const double U = -w.rho * specific_entropy(w, g) / (g.gamma - 1.0);
  return {U, w.u * U};
}

inline EntropyVars entropy_vars(const PrimState& w, const GasParams& g) {
  require_admissible(w, "entropy_vars");
  const double S = specific_entropy(w, g);
  const double beta = w.rho / w.p;
  return {(g.gamma - S) / (g.gamma - 1.0) - 0.5 * beta * w.u * w.u,
          beta * w.u, -beta};
}

/// Closed-form inverse of entropy_vars: u = -v2/v3, rho/p = -v3, S from v1.
inline PrimState vars_to_prim(const EntropyVars& v, const GasParams& g) {
  if (!(v.v3 < 0.0)) {
    throw InvalidEntropyVarsError("entropy variable v3 must be negative, got " +
                                  std::to_string(v.v3));
  }
  const double beta = -v.v3;
  const double u = v.v2 / beta;
  const double S = g.gamma - (g.gamma - 1.0) * (v.v1 + 0.5 * beta * u * u);
  const double rho = std::exp((S + std::log(beta)) / (1.0 - g.gamma));
  const PrimState w{rho, u, rho / beta};
  if (!is_admissible(w)) {
    throw InvalidEntropyVarsError("entropy variables map to a non-finite state");
  }
  return w;
}

inline ZVars z_vars(const PrimState& w) {
  const double z1 = std::sqrt(w.rho / w.p);
  return {z1, z1 * w.u, std::sqrt(w.rho * w.p)};
}

/// Spatial and temporal flux potentials psi = v.f - F and phi = v.u - U.
/// For this entropy pair these reduce to rho u and rho.
struct FluxPotentials {
  double psi = 0.0;
  double phi = 0.0;
};

inline FluxPotentials flux_potentials(const PrimState& w) {
  return {w.rho * w.u, w.rho};
}

/// v.f(w) - F(w), evaluated from the definitions (cross-check for psi).
inline double spatial_potential_from_definition(const PrimState& w,
                                                const GasParams& g) {
  return dot(entropy_vars(w, g).vec(), physical_flux(w, g)) -
         entropy_pair(w, g).F;
}

/// v.u(w) - U(w), evaluated from the definitions (cross-check for phi).
inline double temporal_potential_from_definition(const PrimState& w,
                                                 const GasParams& g) {
  return dot(entropy_vars(w, g).vec(), prim_to_cons(w, g).vec()) -
         entropy_pair(w, g).U;
}

inline double arith_mean(double a, double b) { return 0.5 * (a + b); }

/// Below this value of zeta^2, zeta = (a-b)/(a+b), log_mean uses its series.
inline constexpr double kLogMeanSeriesThreshold = 1.0e-4;

/// Number of terms kept in the series 1 + u/3 + u^2/5 + u^3/7, u = zeta^2.
inline constexpr int kLogMeanSeriesTerms = 4;

/// (a-b)/ln(a/b) evaluated directly, no stabilization.
inline double log_mean_exact(double a, double b) {
  return (a - b) / std::log(a / b);
}

/// Series form (a+b)/(2F), F = ln(a/b)/(2 zeta) = sum_k zeta^(2k)/(2k+1).
inline double log_mean_series(double a, double b) {
  const double zeta = (a - b) / (a + b);
  const double u = zeta * zeta;
  double F = 0.0;
  for (int k = kLogMeanSeriesTerms - 1; k >= 0; --k) {
    F = F * u + 1.0 / (2.0 * k + 1.0);
  }
  return (a + b) / (2.0 * F);
}

inline double log_mean(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw DomainError("log_mean requires positive arguments, got " +
                      std::to_string(a) + ", " + std::to_string(b));
  }
  if (a < b) std::swap(a, b);  // bitwise symmetric in its arguments
  const double zeta = (a - b) / (a + b);
  if (zeta * zeta < kLogMeanSeriesThreshold) return log_mean_series(a, b);
  return log_mean_exact(a, b);
}

}  // namespace stfv
