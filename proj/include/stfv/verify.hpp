/// Seeded randomized certification sweeps behind `stfv verify <suite>`.
///
/// Every suite draws its samples from std::mt19937_64 seeded with
/// kVerifySeed unless told otherwise, so reports are reproducible. The
/// `inject_fault` option corrupts the quantity under test (a sign flip) to
/// prove the sweep can fail.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "stfv/entropy_ledger.hpp"

namespace stfv {

inline constexpr std::uint64_t kVerifySeed = 20240601;

struct VerifyOptions {
  std::uint64_t seed = kVerifySeed;
  bool inject_fault = false;
};

struct VerifyMetric {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed() const { return value <= tolerance; }
};

struct VerifyReport {
  std::string suite;
  std::uint64_t seed = 0;
  int samples = 0;
  std::vector<VerifyMetric> metrics;
  std::vector<std::string> failures;  // offending samples, capped

  bool passed() const {
    for (const auto& m : metrics)
      if (!m.passed()) return false;
    return failures.empty();
  }
};

inline const std::vector<std::string>& verify_suites() {
  static const std::vector<std::string> names{"ec-conditions", "spd", "upwind-decomposition",
                                              "telescoping"};
  return names;
}

/// Samplers for the sweeps.
struct StateSampler {
  double lo = 0.1, hi = 10.0;  // density and pressure
  double u_max = 5.0;

  PrimState operator()(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> rp(lo, hi), ru(-u_max, u_max);
    const double rho = rp(rng);
    const double u = ru(rng);
    const double p = rp(rng);
    return {rho, u, p};
  }
};

namespace detail {

inline constexpr std::size_t kMaxReportedFailures = 10;

inline std::string describe(const PrimState& w) {
  std::ostringstream s;
  s.precision(17);
  s << "(rho=" << w.rho << ", u=" << w.u << ", p=" << w.p << ")";
  return s.str();
}

inline void record(VerifyReport& r, VerifyMetric& m, double value, const std::string& what) {
  m.value = std::max(m.value, value);
  if (!(value <= m.tolerance) && r.failures.size() < kMaxReportedFailures) {
    std::ostringstream s;
    s.precision(3);
    s << m.name << " = " << std::scientific << value << " at " << what;
    r.failures.push_back(s.str());
  }
}

inline Vec3 corrupt(Vec3 f, bool fault) {
  if (fault) f[2] = -f[2];
  return f;
}

}  // namespace detail

/// Roe-type EC fluxes: |[v].flux - [potential]| / max(1, |[potential]|).
inline VerifyReport verify_ec_conditions(const VerifyOptions& opt, int samples = 1000) {
  const GasParams g;
  std::mt19937_64 rng(opt.seed);
  const StateSampler draw;
  VerifyReport r{"ec-conditions", opt.seed, samples, {}, {}};
  VerifyMetric space{"roe_space_scaled_residual", 0.0, 1e-11};
  VerifyMetric time{"roe_time_scaled_residual", 0.0, 1e-11};
  for (int i = 0; i < samples; ++i) {
    const PrimState a = draw(rng), b = draw(rng);
    const EntropyVars va = entropy_vars(a, g), vb = entropy_vars(b, g);
    const std::string pair = detail::describe(a) + " | " + detail::describe(b);
    const Vec3 fs = detail::corrupt(roe_ec_spatial_flux(a, b, g), opt.inject_fault);
    const Vec3 ft = detail::corrupt(roe_ec_temporal_flux(a, b, g), opt.inject_fault);
    detail::record(r, space,
                   std::fabs(ec_residual(fs, va, vb, Direction::Space, g)) /
                       ec_residual_scale(va, vb, Direction::Space, g),
                   pair);
    detail::record(r, time,
                   std::fabs(ec_residual(ft, va, vb, Direction::Time, g)) /
                       ec_residual_scale(va, vb, Direction::Time, g),
                   pair);
  }
  r.metrics = {space, time};
  return r;
}

/// Conserved variables from entropy variables, written out directly so that
/// it also accepts complex arguments.
template <class T>
std::array<T, 3> cons_from_entropy_vars(const std::array<T, 3>& v, double gamma) {
  const T S = gamma - (gamma - 1.0) * (v[0] - v[1] * v[1] / (2.0 * v[2]));
  const T rho = std::exp((S + std::log(-v[2])) / (1.0 - gamma));
  const T p = rho / (-v[2]);
  const T u = -v[1] / v[2];
  return {rho, rho * u, p / (gamma - 1.0) + 0.5 * rho * u * u};
}

/// du/dv by complex-step differentiation of cons_from_entropy_vars.
inline std::array<std::array<double, 3>, 3> fd_temporal_jacobian(const EntropyVars& v,
                                                                 const GasParams& g) {
  constexpr double h = 1e-30;
  std::array<std::array<double, 3>, 3> J{};
  for (int k = 0; k < 3; ++k) {
    std::array<std::complex<double>, 3> z{v.vec()[0], v.vec()[1], v.vec()[2]};
    z[k] += std::complex<double>(0.0, h);
    const auto u = cons_from_entropy_vars(z, g.gamma);
    for (int i = 0; i < 3; ++i) J[i][k] = u[i].imag() / h;
  }
  return J;
}

/// H(v): Cholesky at every sample and max |H - FD| / ||H|| <= 1e-6.
inline VerifyReport verify_spd(const VerifyOptions& opt, int samples = 1000) {
  const GasParams g;
  std::mt19937_64 rng(opt.seed);
  const StateSampler draw;
  VerifyReport r{"spd", opt.seed, samples, {}, {}};
  VerifyMetric fd{"h_fd_relative_error", 0.0, 1e-6};
  VerifyMetric chol{"h_cholesky_failures", 0.0, 0.0};
  int chol_failures = 0;
  for (int i = 0; i < samples; ++i) {
    const PrimState w = draw(rng);
    const EntropyVars v = entropy_vars(w, g);
    SymMatrix3 H = temporal_jacobian(v, g);
    if (opt.inject_fault) H(0, 2) = -H(0, 2);
    const auto J = fd_temporal_jacobian(v, g);
    double err = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) err = std::max(err, std::fabs(H(a, b) - J[a][b]));
    detail::record(r, fd, err / H.norm(), detail::describe(w));
    if (!H.is_spd()) {
      ++chol_failures;
      if (r.failures.size() < detail::kMaxReportedFailures)
        r.failures.push_back("H not SPD at " + detail::describe(w));
    }
  }
  chol.value = chol_failures;
  r.metrics = {fd, chol};
  return r;
}

/// Pairs for the decomposition sweep: moderate ratios so that an order-32
/// rule integrates both path integrals to roundoff.
inline std::pair<PrimState, PrimState> draw_moderate_pair(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> rp(0.5, 2.0), ru(-1.0, 1.0);
  const PrimState a{rp(rng), ru(rng), rp(rng)};
  const PrimState b{rp(rng), ru(rng), rp(rng)};
  return {a, b};
}

inline constexpr int kDecompositionOrder = 32;

/// u^n = u* - T dv with u* and T on the same rule; T must pass Cholesky.
inline VerifyReport verify_upwind_decomposition_suite(const VerifyOptions& opt,
                                                      int samples = 100) {
  const GasParams g;
  std::mt19937_64 rng(opt.seed);
  const QuadratureRule q = QuadratureRule::gauss_legendre(kDecompositionOrder);
  VerifyReport r{"upwind-decomposition", opt.seed, samples, {}, {}};
  VerifyMetric defect{"relative_defect", 0.0, 1e-12};
  VerifyMetric chol{"t_cholesky_failures", 0.0, 0.0};
  int chol_failures = 0;
  for (int i = 0; i < samples; ++i) {
    const auto [a, b] = draw_moderate_pair(rng);
    const EntropyVars va = entropy_vars(a, g), vb = entropy_vars(b, g);
    const Vec3 u_star = tadmor_ec_temporal_flux(va, vb, q, g);
    SymMatrix3 T = upwind_equivalent_T(va, vb, q, g);
    if (opt.inject_fault) T = -1.0 * T;
    const Vec3 un = prim_to_cons(a, g).vec();
    const double d = norm2(un - (u_star - T * (vb.vec() - va.vec()))) / norm2(un);
    const std::string pair = detail::describe(a) + " | " + detail::describe(b);
    detail::record(r, defect, d, pair);
    if (!T.is_spd()) {
      ++chol_failures;
      if (r.failures.size() < detail::kMaxReportedFailures)
        r.failures.push_back("T not SPD at " + pair);
    }
  }
  chol.value = chol_failures;
  r.metrics = {defect, chol};
  return r;
}

/// Telescoping of the symmetric numerical entropy fluxes under Roe EC fluxes,
/// for random triples of neighbouring states, in space and in time. The
/// defect is scaled by max(1, |v_j| (|f_+| + |f_-|)), the size of the terms
/// that cancel.
inline VerifyReport verify_telescoping(const VerifyOptions& opt, int samples = 1000) {
  const GasParams g;
  std::mt19937_64 rng(opt.seed);
  const StateSampler draw;
  VerifyReport r{"telescoping", opt.seed, samples, {}, {}};
  VerifyMetric space{"space_scaled_defect", 0.0, 1e-11};
  VerifyMetric time{"time_scaled_defect", 0.0, 1e-11};
  for (int i = 0; i < samples; ++i) {
    const PrimState wm = draw(rng), w0 = draw(rng), wp = draw(rng);
    const EntropyVars vm = entropy_vars(wm, g), v0 = entropy_vars(w0, g),
                      vp = entropy_vars(wp, g);
    const std::string triple =
        detail::describe(wm) + " | " + detail::describe(w0) + " | " + detail::describe(wp);

    const Vec3 fm = roe_ec_spatial_flux(wm, w0, g);
    const Vec3 fp = detail::corrupt(roe_ec_spatial_flux(w0, wp, g), opt.inject_fault);
    const double ds = (numerical_entropy_flux_space(v0, vp, fp, g) -
                       numerical_entropy_flux_space(vm, v0, fm, g)) -
                      dot(v0.vec(), fp - fm);
    const double ss = std::max(1.0, norm2(v0.vec()) * (norm2(fp) + norm2(fm)));
    detail::record(r, space, std::fabs(ds) / ss, triple);

    const Vec3 um = roe_ec_temporal_flux(wm, w0, g);
    const Vec3 up = detail::corrupt(roe_ec_temporal_flux(w0, wp, g), opt.inject_fault);
    const double dt = (numerical_entropy_flux_time(v0, vp, up, g) -
                       numerical_entropy_flux_time(vm, v0, um, g)) -
                      dot(v0.vec(), up - um);
    const double st = std::max(1.0, norm2(v0.vec()) * (norm2(up) + norm2(um)));
    detail::record(r, time, std::fabs(dt) / st, triple);
  }
  r.metrics = {space, time};
  return r;
}

/// Dispatch by suite name; throws DomainError for an unknown suite.
inline VerifyReport run_verify_suite(const std::string& suite, const VerifyOptions& opt) {
  if (suite == "ec-conditions") return verify_ec_conditions(opt);
  if (suite == "spd") return verify_spd(opt);
  if (suite == "upwind-decomposition") return verify_upwind_decomposition_suite(opt);
  if (suite == "telescoping") return verify_telescoping(opt);
  throw DomainError("unknown verify suite \"" + suite + "\"");
}

inline std::string format_report(const VerifyReport& r) {
  std::ostringstream s;
  s << "suite " << r.suite << " seed " << r.seed << " samples " << r.samples << "\n";
  for (const auto& m : r.metrics) {
    s.precision(3);
    s << "  " << (m.passed() ? "ok  " : "FAIL") << " " << m.name << " max " << std::scientific
      << m.value << " tol " << m.tolerance << std::defaultfloat << "\n";
  }
  for (const auto& f : r.failures) s << "  offending: " << f << "\n";
  s << (r.passed() ? "PASSED" : "FAILED") << "\n";
  return s.str();
}

}  // namespace stfv
