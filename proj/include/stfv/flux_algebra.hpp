/// Entropy-conservative interface fluxes in space and time.
///
/// Spatial fluxes target [v].f* = [psi] with psi = rho u; temporal fluxes
/// target [v].u* = [phi] with phi = rho. The Roe-type fluxes are closed form
/// in the z-variables; the Tadmor-type fluxes integrate f(v) or u(v) along the
/// straight entropy-variable path with a Gauss-Legendre rule.
#pragma once

#include <string_view>

#include "stfv/gas_model.hpp"
#include "stfv/quadrature.hpp"

namespace stfv {

enum class Direction { Space, Time };

inline std::string_view to_string(Direction d) {
  return d == Direction::Space ? "space" : "time";
}

namespace detail {

struct ZMeans {
  double z1_bar;
  double z2_bar;
  double z3_bar;
  double z1_ln;
  double z3_ln;
};

inline ZMeans z_means(const PrimState& a, const PrimState& b) {
  const ZVars za = z_vars(a);
  const ZVars zb = z_vars(b);
  return {arith_mean(za.z1, zb.z1), arith_mean(za.z2, zb.z2),
          arith_mean(za.z3, zb.z3), log_mean(za.z1, zb.z1),
          log_mean(za.z3, zb.z3)};
}

}  // namespace detail

inline Vec3 roe_ec_spatial_flux(const PrimState& wL, const PrimState& wR,
                                const GasParams& g) {
  require_admissible(wL, "roe_ec_spatial_flux");
  require_admissible(wR, "roe_ec_spatial_flux");
  const auto m = detail::z_means(wL, wR);
  const double ratio = (1.0 + g.gamma) / (1.0 - g.gamma);
  const double f1 = m.z2_bar * m.z3_ln;
  const double f2 = (m.z3_bar + f1 * m.z2_bar) / m.z1_bar;
  const double f3 = (-f1 * ratio / m.z1_ln + f2 * m.z2_bar) / (2.0 * m.z1_bar);
  return {f1, f2, f3};
}

inline Vec3 roe_ec_temporal_flux(const PrimState& wPast,
                                 const PrimState& wFuture, const GasParams& g) {
  require_admissible(wPast, "roe_ec_temporal_flux");
  require_admissible(wFuture, "roe_ec_temporal_flux");
  const auto m = detail::z_means(wPast, wFuture);
  const double ratio = (1.0 + g.gamma) / (1.0 - g.gamma);
  const double u1 = m.z1_bar * m.z3_ln;
  const double u2 = u1 * m.z2_bar / m.z1_bar;
  const double u3 =
      (-u1 * ratio / m.z1_ln + u2 * m.z2_bar - m.z3_bar) / (2.0 * m.z1_bar);
  return {u1, u2, u3};
}

/// Primitive state at v(xi) = a + xi (b - a); throws PathInadmissibleError.
inline PrimState path_state(const EntropyVars& a, const EntropyVars& b,
                            double xi, std::size_t node, const GasParams& g) {
  const Vec3 v = a.vec() + xi * (b.vec() - a.vec());
  try {
    return vars_to_prim(EntropyVars::from(v), g);
  } catch (const InvalidEntropyVarsError&) {
    throw PathInadmissibleError(node, xi);
  }
}

inline Vec3 tadmor_ec_spatial_flux(const EntropyVars& vL, const EntropyVars& vR,
                                   const QuadratureRule& q,
                                   const GasParams& g) {
  Vec3 sum{};
  for (std::size_t k = 0; k < q.nodes.size(); ++k) {
    sum += q.weights[k] * physical_flux(path_state(vL, vR, q.nodes[k], k, g), g);
  }
  return sum;
}

inline Vec3 tadmor_ec_temporal_flux(const EntropyVars& vPast,
                                    const EntropyVars& vFuture,
                                    const QuadratureRule& q,
                                    const GasParams& g) {
  Vec3 sum{};
  for (std::size_t k = 0; k < q.nodes.size(); ++k) {
    const PrimState w = path_state(vPast, vFuture, q.nodes[k], k, g);
    sum += q.weights[k] * prim_to_cons(w, g).vec();
  }
  return sum;
}

/// [v].flux - [psi] (space) or [v].flux - [phi] (time); zero for an EC flux.
inline double ec_residual(const Vec3& flux, const EntropyVars& vL,
                          const EntropyVars& vR, Direction kind,
                          const GasParams& g) {
  const FluxPotentials pL = flux_potentials(vars_to_prim(vL, g));
  const FluxPotentials pR = flux_potentials(vars_to_prim(vR, g));
  const double jump = kind == Direction::Space ? pR.psi - pL.psi : pR.phi - pL.phi;
  return dot(vR.vec() - vL.vec(), flux) - jump;
}

/// Scale used to normalize EC residuals: max(1, |potential jump|).
inline double ec_residual_scale(const EntropyVars& vL, const EntropyVars& vR,
                                Direction kind, const GasParams& g) {
  const FluxPotentials pL = flux_potentials(vars_to_prim(vL, g));
  const FluxPotentials pR = flux_potentials(vars_to_prim(vR, g));
  const double jump = kind == Direction::Space ? pR.psi - pL.psi : pR.phi - pL.phi;
  return std::fmax(1.0, std::fabs(jump));
}

}  // namespace stfv
