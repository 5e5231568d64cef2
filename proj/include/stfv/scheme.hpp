/// Scheme configuration and interface-flux evaluation shared by the
/// space-time solver and the entropy ledger.
#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "stfv/dissipation.hpp"

namespace stfv {

enum class InterfaceFluxKind {
  RoeECSpace,
  TadmorECSpace,
  RoeECTime,
  TadmorECTime,
  UpwindTime,
  ESSpace,
  ESTime,
};

inline std::string_view to_string(InterfaceFluxKind k) {
  switch (k) {
    case InterfaceFluxKind::RoeECSpace: return "roe_ec_space";
    case InterfaceFluxKind::TadmorECSpace: return "tadmor_ec_space";
    case InterfaceFluxKind::RoeECTime: return "roe_ec_time";
    case InterfaceFluxKind::TadmorECTime: return "tadmor_ec_time";
    case InterfaceFluxKind::UpwindTime: return "upwind_time";
    case InterfaceFluxKind::ESSpace: return "es_space";
    case InterfaceFluxKind::ESTime: return "es_time";
  }
  return "unknown";
}

/// Entropy-conservative base flux family.
enum class EcFamily { Roe, Tadmor };

inline std::string_view to_string(EcFamily f) {
  return f == EcFamily::Roe ? "roe" : "tadmor";
}

struct SpatialFluxConfig {
  EcFamily base = EcFamily::Roe;
  std::optional<DissipationSpec> dissipation;  // present => entropy stable
};

enum class TemporalFluxType { Upwind, RoeEC, TadmorEC };

inline std::string_view to_string(TemporalFluxType t) {
  switch (t) {
    case TemporalFluxType::Upwind: return "upwind";
    case TemporalFluxType::RoeEC: return "roe";
    case TemporalFluxType::TadmorEC: return "tadmor";
  }
  return "unknown";
}

struct TemporalFluxConfig {
  TemporalFluxType type = TemporalFluxType::Upwind;
  std::optional<DissipationSpec> dissipation;  // only for RoeEC/TadmorEC
};

struct NewtonSettings {
  double abs_tol = 1e-10;
  double rel_tol = 1e-14;
  int max_iterations = 30;
  double damping = 1.0;   // initial step length
  int max_halvings = 30;
};

struct SchemeConfig {
  GasParams gas;
  SpatialFluxConfig spatial{EcFamily::Roe, DissipationSpec::scalar_times_h()};
  TemporalFluxConfig temporal;
  int quadrature_order = 8;          // Tadmor-type fluxes
  int ledger_quadrature_order = 32;  // upwind-equivalent T in the ledger
  NewtonSettings newton;
};

inline InterfaceFluxKind kind_of(const SpatialFluxConfig& c) {
  if (c.dissipation) return InterfaceFluxKind::ESSpace;
  return c.base == EcFamily::Roe ? InterfaceFluxKind::RoeECSpace
                                 : InterfaceFluxKind::TadmorECSpace;
}

inline InterfaceFluxKind kind_of(const TemporalFluxConfig& c) {
  if (c.type == TemporalFluxType::Upwind) return InterfaceFluxKind::UpwindTime;
  if (c.dissipation) return InterfaceFluxKind::ESTime;
  return c.type == TemporalFluxType::RoeEC ? InterfaceFluxKind::RoeECTime
                                           : InterfaceFluxKind::TadmorECTime;
}

inline void validate(const SchemeConfig& cfg) {
  validate(cfg.gas);
  if (cfg.spatial.dissipation) {
    validate(*cfg.spatial.dissipation);
    if (cfg.spatial.dissipation->applies_to != Direction::Space) {
      throw DissipationSpecError("spatial flux needs a space dissipation spec");
    }
  }
  if (cfg.temporal.dissipation) {
    if (cfg.temporal.type == TemporalFluxType::Upwind) {
      throw DissipationSpecError("upwind temporal flux takes no dissipation spec");
    }
    validate(*cfg.temporal.dissipation);
    if (cfg.temporal.dissipation->applies_to != Direction::Time) {
      throw DissipationSpecError("temporal flux needs a time dissipation spec");
    }
  }
  if (cfg.quadrature_order < 1 || cfg.ledger_quadrature_order < 1) {
    throw DomainError("quadrature orders must be positive");
  }
  const auto& n = cfg.newton;
  if (!(n.abs_tol > 0.0) || !(n.rel_tol >= 0.0) || n.max_iterations < 1 ||
      !(n.damping > 0.0 && n.damping <= 1.0) || n.max_halvings < 0) {
    throw DomainError("invalid Newton settings");
  }
}

/// A cell state together with its primitive and entropy-variable forms.
struct CellState {
  ConsState u;
  PrimState w;
  EntropyVars v;
};

inline CellState make_cell(const ConsState& u, const GasParams& g) {
  const PrimState w = cons_to_prim(u, g);
  return {u, w, entropy_vars(w, g)};
}

/// Validated scheme with its quadrature rules built once.
class Scheme {
 public:
  explicit Scheme(SchemeConfig cfg) : cfg_(std::move(cfg)) {
    validate(cfg_);
    flux_rule_ = QuadratureRule::gauss_legendre(cfg_.quadrature_order);
    ledger_rule_ = QuadratureRule::gauss_legendre(cfg_.ledger_quadrature_order);
    if (cfg_.temporal.dissipation &&
        cfg_.temporal.dissipation->kind == DissipationKind::UpwindEquivalentIntegral) {
      dissipation_rule_ =
          QuadratureRule::gauss_legendre(cfg_.temporal.dissipation->quadrature_order);
    }
  }

  const SchemeConfig& config() const { return cfg_; }
  const GasParams& gas() const { return cfg_.gas; }
  const QuadratureRule& flux_rule() const { return flux_rule_; }

  Vec3 spatial_ec_flux(const CellState& L, const CellState& R) const {
    if (cfg_.spatial.base == EcFamily::Roe) return roe_ec_spatial_flux(L.w, R.w, gas());
    return tadmor_ec_spatial_flux(L.v, R.v, flux_rule_, gas());
  }

  /// Dissipation matrix of the spatial flux; zero for an EC flux.
  SymMatrix3 spatial_dissipation(const CellState& L, const CellState& R) const {
    if (!cfg_.spatial.dissipation) return {};
    return dissipation_matrix(*cfg_.spatial.dissipation, L.v, R.v, gas());
  }

  Vec3 spatial_flux(const CellState& L, const CellState& R) const {
    const Vec3 ec = spatial_ec_flux(L, R);
    if (!cfg_.spatial.dissipation) return ec;
    return ec - spatial_dissipation(L, R) * (R.v.vec() - L.v.vec());
  }

  /// Temporal flux across an interior interface coupling past and future.
  Vec3 temporal_flux(const CellState& past, const CellState& future) const {
    switch (cfg_.temporal.type) {
      case TemporalFluxType::Upwind:
        return past.u.vec();
      case TemporalFluxType::RoeEC:
      case TemporalFluxType::TadmorEC: {
        const Vec3 ec = cfg_.temporal.type == TemporalFluxType::RoeEC
                            ? roe_ec_temporal_flux(past.w, future.w, gas())
                            : tadmor_ec_temporal_flux(past.v, future.v, flux_rule_, gas());
        if (!cfg_.temporal.dissipation) return ec;
        return ec - temporal_dissipation(past, future) * (future.v.vec() - past.v.vec());
      }
    }
    return past.u.vec();
  }

  /// Dissipation matrix of the configured temporal flux. Upwinding reports
  /// its equivalent T on the ledger rule; an EC flux reports zero.
  SymMatrix3 temporal_dissipation(const CellState& past, const CellState& future) const {
    if (cfg_.temporal.type == TemporalFluxType::Upwind) {
      return upwind_dissipation(past, future);
    }
    if (!cfg_.temporal.dissipation) return {};
    return dissipation_matrix(*cfg_.temporal.dissipation, past.v, future.v, gas(),
                              &dissipation_rule_);
  }

  /// Upwind-equivalent T on the ledger rule (used at causal interfaces).
  SymMatrix3 upwind_dissipation(const CellState& past, const CellState& future) const {
    return upwind_equivalent_T(past.v, future.v, ledger_rule_, gas());
  }

 private:
  SchemeConfig cfg_;
  QuadratureRule flux_rule_;
  QuadratureRule ledger_rule_;
  QuadratureRule dissipation_rule_;
};

}  // namespace stfv
