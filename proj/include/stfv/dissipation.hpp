/// Temporal Jacobian H(v) = du/dv, dissipation operators for entropy-stable
/// fluxes in space and time, and the upwind-in-time decomposition
/// u^n = u* - T dv with T = int_0^1 (1 - xi) H(v(xi)) dxi.
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "stfv/flux_algebra.hpp"

namespace stfv {

/// Symmetric 3x3 matrix; only the upper triangle is stored.
class SymMatrix3 {
 public:
  SymMatrix3() = default;

  double operator()(int i, int j) const { return a_[index(i, j)]; }
  double& operator()(int i, int j) { return a_[index(i, j)]; }

  static SymMatrix3 identity() {
    SymMatrix3 m;
    m(0, 0) = m(1, 1) = m(2, 2) = 1.0;
    return m;
  }

  Vec3 operator*(const Vec3& x) const {
    Vec3 y{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) y[i] += (*this)(i, j) * x[j];
    return y;
  }

  friend SymMatrix3 operator*(double s, SymMatrix3 m) {
    for (double& x : m.a_) x *= s;
    return m;
  }

  friend SymMatrix3 operator+(SymMatrix3 a, const SymMatrix3& b) {
    for (std::size_t k = 0; k < a.a_.size(); ++k) a.a_[k] += b.a_[k];
    return a;
  }

  double quadratic_form(const Vec3& x) const { return dot(x, (*this) * x); }

  /// Frobenius norm.
  double norm() const {
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) s += (*this)(i, j) * (*this)(i, j);
    return std::sqrt(s);
  }

  /// Lower Cholesky factor, or nullopt if the matrix is not positive definite.
  std::optional<std::array<double, 6>> cholesky() const {
    const SymMatrix3& m = *this;
    std::array<double, 6> l{};  // l00 l10 l11 l20 l21 l22
    const double d0 = m(0, 0);
    if (!(d0 > 0.0)) return std::nullopt;
    l[0] = std::sqrt(d0);
    l[1] = m(1, 0) / l[0];
    const double d1 = m(1, 1) - l[1] * l[1];
    if (!(d1 > 0.0)) return std::nullopt;
    l[2] = std::sqrt(d1);
    l[3] = m(2, 0) / l[0];
    l[4] = (m(2, 1) - l[3] * l[1]) / l[2];
    const double d2 = m(2, 2) - l[3] * l[3] - l[4] * l[4];
    if (!(d2 > 0.0)) return std::nullopt;
    l[5] = std::sqrt(d2);
    return l;
  }

  bool is_spd() const { return cholesky().has_value(); }

 private:
  static int index(int i, int j) {
    if (i > j) std::swap(i, j);
    return i == 0 ? j : (i == 1 ? 2 + j : 5);
  }

  std::array<double, 6> a_{};
};

/// H(v) = du/dv, obtained by inverting the analytic Hessian dv/du.
inline SymMatrix3 temporal_jacobian(const EntropyVars& v, const GasParams& g) {
  const PrimState w = vars_to_prim(v, g);
  const ConsState c = prim_to_cons(w, g);
  const double gm1 = g.gamma - 1.0;
  const double rho = c.rho;
  const double m = c.mom;
  const double p = w.p;
  const Vec3 d_rho{1.0, 0.0, 0.0};
  const Vec3 d_m{0.0, 1.0, 0.0};
  const Vec3 d_p{gm1 * 0.5 * w.u * w.u, -gm1 * w.u, gm1};
  const Vec3 d_S = (1.0 / p) * d_p - (g.gamma / rho) * d_rho;
  // q = m^2 / (2 rho p), the kinetic term of v1.
  const double q = 0.5 * m * m / (rho * p);
  const Vec3 d_q = (m / (rho * p)) * d_m - (q / rho) * d_rho - (q / p) * d_p;

  const Vec3 row0 = (-1.0 / gm1) * d_S - d_q;
  const Vec3 row1 = (1.0 / p) * d_m - (m / (p * p)) * d_p;
  const Vec3 row2 = (-1.0 / p) * d_rho + (rho / (p * p)) * d_p;
  const double a[3][3] = {{row0[0], row0[1], row0[2]},
                          {row1[0], row1[1], row1[2]},
                          {row2[0], row2[1], row2[2]}};

  const double c00 = a[1][1] * a[2][2] - a[1][2] * a[2][1];
  const double c01 = a[1][2] * a[2][0] - a[1][0] * a[2][2];
  const double c02 = a[1][0] * a[2][1] - a[1][1] * a[2][0];
  const double det = a[0][0] * c00 + a[0][1] * c01 + a[0][2] * c02;
  if (!(std::fabs(det) > 0.0) || !std::isfinite(det)) {
    throw Error("temporal_jacobian: singular entropy Hessian");
  }
  // inv = adj(a)^T / det; adj entries written as cofactors c_ij.
  const double c10 = a[0][2] * a[2][1] - a[0][1] * a[2][2];
  const double c11 = a[0][0] * a[2][2] - a[0][2] * a[2][0];
  const double c12 = a[0][1] * a[2][0] - a[0][0] * a[2][1];
  const double c20 = a[0][1] * a[1][2] - a[0][2] * a[1][1];
  const double c21 = a[0][2] * a[1][0] - a[0][0] * a[1][2];
  const double c22 = a[0][0] * a[1][1] - a[0][1] * a[1][0];
  const double inv[3][3] = {{c00 / det, c10 / det, c20 / det},
                            {c01 / det, c11 / det, c21 / det},
                            {c02 / det, c12 / det, c22 / det}};
  SymMatrix3 H;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) H(i, j) = 0.5 * (inv[i][j] + inv[j][i]);
  return H;
}

/// Upwinding in time: the temporal flux is the past-slab state.
inline ConsState upwind_temporal_flux(const ConsState& uPast) { return uPast; }

/// T = sum_k w_k (1 - xi_k) H(v(xi_k)) along the straight path vPast -> vFuture.
inline SymMatrix3 upwind_equivalent_T(const EntropyVars& vPast,
                                      const EntropyVars& vFuture,
                                      const QuadratureRule& q,
                                      const GasParams& g) {
  SymMatrix3 T;
  for (std::size_t k = 0; k < q.nodes.size(); ++k) {
    const double xi = q.nodes[k];
    const PrimState w = path_state(vPast, vFuture, xi, k, g);
    T = T + (q.weights[k] * (1.0 - xi)) * temporal_jacobian(entropy_vars(w, g), g);
  }
  return T;
}

/// Euclidean norm of u^n - (u* - T dv) with u* the Tadmor temporal flux and T
/// the upwind-equivalent matrix, both on the rule q.
inline double verify_upwind_decomposition(const PrimState& wPast,
                                          const PrimState& wFuture,
                                          const QuadratureRule& q,
                                          const GasParams& g) {
  const EntropyVars vP = entropy_vars(wPast, g);
  const EntropyVars vF = entropy_vars(wFuture, g);
  const Vec3 u_star = tadmor_ec_temporal_flux(vP, vF, q, g);
  const SymMatrix3 T = upwind_equivalent_T(vP, vF, q, g);
  const Vec3 dv = vF.vec() - vP.vec();
  return norm2(prim_to_cons(wPast, g).vec() - (u_star - T * dv));
}

enum class DissipationKind { ScalarTimesH, UpwindEquivalentIntegral, ThetaTimesH };

inline std::string_view to_string(DissipationKind k) {
  switch (k) {
    case DissipationKind::ScalarTimesH: return "scalar_times_h";
    case DissipationKind::UpwindEquivalentIntegral: return "upwind_equivalent";
    case DissipationKind::ThetaTimesH: return "theta_times_h";
  }
  return "unknown";
}

/// Dissipation operator attached to an entropy-stable flux.
///
/// ScalarTimesH (space): scale * max(|u| + a) * H(v_bar).
/// ThetaTimesH (time): theta * H(v_bar), theta in [0, 1]; theta = 0 is EC.
/// UpwindEquivalentIntegral (time): the (1 - xi)-weighted integral of H.
/// v_bar is the arithmetic mean of the two entropy-variable states.
struct DissipationSpec {
  DissipationKind kind = DissipationKind::ScalarTimesH;
  Direction applies_to = Direction::Space;
  double scale = 1.0;
  double theta = 0.5;
  int quadrature_order = 8;

  static DissipationSpec scalar_times_h(double scale = 0.5) {
    return {DissipationKind::ScalarTimesH, Direction::Space, scale, 0.0, 0};
  }
  static DissipationSpec theta_times_h(double theta) {
    return {DissipationKind::ThetaTimesH, Direction::Time, 1.0, theta, 0};
  }
  static DissipationSpec upwind_equivalent(int order = 8) {
    return {DissipationKind::UpwindEquivalentIntegral, Direction::Time, 1.0,
            0.0, order};
  }
};

inline void validate(const DissipationSpec& s) {
  const bool space_kind = s.kind == DissipationKind::ScalarTimesH;
  if (space_kind != (s.applies_to == Direction::Space)) {
    throw DissipationSpecError(std::string(to_string(s.kind)) +
                               " cannot be applied in " +
                               std::string(to_string(s.applies_to)));
  }
  if (s.kind == DissipationKind::ThetaTimesH && !(s.theta >= 0.0 && s.theta <= 1.0)) {
    throw DissipationSpecError("theta must lie in [0, 1], got " +
                               std::to_string(s.theta));
  }
  if (s.kind == DissipationKind::ScalarTimesH && !(s.scale > 0.0)) {
    throw DissipationSpecError("dissipation scale must be positive");
  }
  if (s.kind == DissipationKind::UpwindEquivalentIntegral && s.quadrature_order < 1) {
    throw DissipationSpecError("quadrature order must be positive");
  }
}

inline EntropyVars mean_entropy_vars(const EntropyVars& a, const EntropyVars& b) {
  return EntropyVars::from(0.5 * (a.vec() + b.vec()));
}

/// Matrix M of the dissipation term M dv for the given pair of states. An
/// optional precomputed rule avoids rebuilding it for the integral kind.
inline SymMatrix3 dissipation_matrix(const DissipationSpec& spec,
                                     const EntropyVars& vL, const EntropyVars& vR,
                                     const GasParams& g,
                                     const QuadratureRule* rule = nullptr) {
  validate(spec);
  SymMatrix3 M;
  switch (spec.kind) {
    case DissipationKind::ScalarTimesH: {
      const PrimState wL = vars_to_prim(vL, g);
      const PrimState wR = vars_to_prim(vR, g);
      const double alpha = std::max(std::fabs(wL.u) + sound_speed(wL, g),
                                    std::fabs(wR.u) + sound_speed(wR, g));
      M = (spec.scale * alpha) * temporal_jacobian(mean_entropy_vars(vL, vR), g);
      break;
    }
    case DissipationKind::ThetaTimesH:
      if (spec.theta == 0.0) return M;
      M = spec.theta * temporal_jacobian(mean_entropy_vars(vL, vR), g);
      break;
    case DissipationKind::UpwindEquivalentIntegral:
      if (rule != nullptr && rule->order() == spec.quadrature_order) {
        M = upwind_equivalent_T(vL, vR, *rule, g);
      } else {
        M = upwind_equivalent_T(
            vL, vR, QuadratureRule::gauss_legendre(spec.quadrature_order), g);
      }
      break;
  }
  if (!M.is_spd()) {
    throw DissipationSpecError(std::string(to_string(spec.kind)) +
                               " produced a matrix that is not SPD");
  }
  return M;
}

/// ecFlux - M dv.
inline Vec3 es_interface_flux(const Vec3& ecFlux, const Vec3& dv,
                              const DissipationSpec& spec, const EntropyVars& vL,
                              const EntropyVars& vR, const GasParams& g) {
  return ecFlux - dissipation_matrix(spec, vL, vR, g) * dv;
}

/// (1/(2 dt)) [dv+^T T+ dv+ + dv-^T T- dv-].
inline double entropy_production_time(const Vec3& dv_minus, const Vec3& dv_plus,
                                      const SymMatrix3& T_minus,
                                      const SymMatrix3& T_plus, double dt) {
  return (T_plus.quadratic_form(dv_plus) + T_minus.quadratic_form(dv_minus)) /
         (2.0 * dt);
}

/// (1/(2 dx)) [dv_{j+1/2}^T Q dv_{j+1/2} + dv_{j-1/2}^T Q dv_{j-1/2}].
inline double entropy_production_space(const Vec3& dv_minus, const Vec3& dv_plus,
                                       const SymMatrix3& Q_minus,
                                       const SymMatrix3& Q_plus, double dx) {
  return (Q_plus.quadratic_form(dv_plus) + Q_minus.quadratic_form(dv_minus)) /
         (2.0 * dx);
}

}  // namespace stfv
