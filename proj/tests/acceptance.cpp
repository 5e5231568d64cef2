// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Each criterion also has a wall-clock budget.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>

#include "stfv/advance.hpp"
#include "stfv/problems.hpp"
#include "stfv/verify.hpp"

using namespace stfv;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

int failures = 0;

void criterion(const char* id, const char* title, double budget_s,
               const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < budget_s;
  const bool ok = o.pass && in_time;
  if (!ok) ++failures;
  std::printf("%s %s  %s: %s; runtime %.2f s (budget %.0f s%s)\n", id, ok ? "PASS" : "FAIL", title,
              o.detail.c_str(), secs, budget_s, in_time ? "" : ", EXCEEDED");
  std::fflush(stdout);
}

struct Setup {
  Problem problem;
  SpaceTimeGrid grid;
  SlabStates ic;
};

// Grid at the given CFL. With n_slabs = 0 the run ends exactly at the
// preset's final time.
Setup setup(Preset p, int n_cells, double cfl, int n_slabs, std::optional<Boundary> b = {}) {
  Setup s;
  s.problem = make_preset(p);
  if (b) s.problem.boundary = *b;
  s.grid = make_grid(s.problem, n_cells, 1.0, 1);
  s.ic = cell_means(s.problem, s.grid);
  const double dt = dt_for_cfl(cfl, s.grid.dx, s.ic, s.problem.gas);
  if (n_slabs > 0) {
    s.grid.dt = dt;
    s.grid.n_slabs = n_slabs;
  } else {
    s.grid.n_slabs = static_cast<int>(std::ceil(s.problem.t_final / dt - 1e-9));
    s.grid.dt = s.problem.t_final / s.grid.n_slabs;
  }
  return s;
}

SchemeConfig upwind_es(double tol) {
  SchemeConfig c;  // Roe EC + scalar_times_h in space, upwind in time
  c.newton.abs_tol = tol;
  return c;
}

SchemeConfig ec_space_ec_time(double tol) {
  SchemeConfig c;
  c.spatial = {EcFamily::Roe, std::nullopt};
  c.temporal = {TemporalFluxType::RoeEC, std::nullopt};
  c.newton.abs_tol = tol;
  return c;
}

std::string metric_line(const VerifyReport& r) {
  std::string s;
  for (const auto& m : r.metrics) {
    if (!s.empty()) s += ", ";
    s += m.name + "=" + fmt("%.2e", m.value) + " (tol " + fmt("%.0e", m.tolerance) + ")";
  }
  return s + ", " + std::to_string(r.samples) + " samples, seed " + std::to_string(r.seed);
}

Outcome from_report(const VerifyReport& r) { return {r.passed(), metric_line(r)}; }

// Quadrature EC fluxes. A residual counts as decreasing when it does not
// exceed the previous one, or when both are at the roundoff floor of the
// terms being cancelled.
Outcome quadrature_ec() {
  const GasParams g;
  std::mt19937_64 rng(kVerifySeed);
  std::uniform_real_distribution<double> base(0.2, 5.0), ratio(0.5, 2.0), du(-0.5, 0.5);
  const int orders[] = {2, 4, 8, 16};
  std::vector<QuadratureRule> rules;
  for (int o : orders) rules.push_back(QuadratureRule::gauss_legendre(o));
  const double eps = std::numeric_limits<double>::epsilon();
  double worst16 = 0.0;
  int non_monotone = 0;
  for (int i = 0; i < 20; ++i) {
    const PrimState a{base(rng), du(rng), base(rng)};
    const PrimState b{a.rho * ratio(rng), a.u + du(rng), a.p * ratio(rng)};
    const EntropyVars va = entropy_vars(a, g), vb = entropy_vars(b, g);
    const Vec3 dv = vb.vec() - va.vec();
    for (const Direction d : {Direction::Space, Direction::Time}) {
      double prev = INFINITY;
      for (const auto& q : rules) {
        const Vec3 f = d == Direction::Space ? tadmor_ec_spatial_flux(va, vb, q, g)
                                             : tadmor_ec_temporal_flux(va, vb, q, g);
        const double r = std::fabs(ec_residual(f, va, vb, d, g));
        double scale = ec_residual_scale(va, vb, d, g);
        for (int k = 0; k < 3; ++k) scale += std::fabs(dv[k] * f[k]);
        if (r > std::max(prev, 64 * eps * scale)) ++non_monotone;
        prev = r;
        if (q.order() == 16) worst16 = std::max(worst16, r);
      }
    }
  }
  return {non_monotone == 0 && worst16 <= 1e-10,
          "20 pairs x {space,time}, non-monotone sequences " + std::to_string(non_monotone) +
              ", max order-16 residual " + fmt("%.2e", worst16) + " (tol 1e-10)"};
}

Outcome entropy_conservation() {
  const Setup s = setup(Preset::DensityWave, 100, 0.5, 20);
  const AdvanceResult r =
      advance(s.ic, Scheme(ec_space_ec_time(1e-12)), s.grid, CouplingMode::block(20));
  const auto series = global_entropy_series(r.budget);
  double dev = 0.0;
  for (double v : series) dev = std::max(dev, std::fabs(v - series.front()));
  const Vec3 init = r.budget.initial_conserved_totals;
  double drift = 0.0;
  for (const auto& sl : r.budget.slabs)
    for (int k = 0; k < 3; ++k)
      drift = std::max(drift, std::fabs(sl.conserved_totals[k] - init[k]) /
                                  std::max(1.0, std::fabs(init[k])));
  const double maxR = r.budget.max_abs_residual();
  return {maxR <= 1e-10 && dev <= 1e-8 && drift <= 1e-11,
          "max |R| " + fmt("%.2e", maxR) + " (tol 1e-10), |d sum U dx| " + fmt("%.2e", dev) +
              " (tol 1e-8), conserved drift " + fmt("%.2e", drift) + " (tol 1e-11), Newton its " +
              std::to_string(r.trajectory.slabs[0].newton.iterations)};
}

Outcome entropy_stability(Preset p) {
  const Setup s = setup(p, 100, 0.5, 0, Boundary::Periodic);
  const AdvanceResult r = advance(s.ic, Scheme(upwind_es(1e-12)), s.grid, CouplingMode::causal());
  const auto series = global_entropy_series(r.budget);
  double max_inc = -INFINITY;
  for (std::size_t i = 1; i < series.size(); ++i) max_inc = std::max(max_inc, series[i] - series[i - 1]);
  const double mismatch = r.budget.max_formula_mismatch();
  return {max_inc <= 0.0 && mismatch <= 1e-9,
          std::string(to_string(p)) + " " + std::to_string(s.grid.n_slabs) +
              " slabs, max increase of sum U dx " + fmt("%.2e", max_inc) + " (must be <= 0), " +
              "max |R + E| / max(1,|E|) " + fmt("%.2e", mismatch) + " (tol 1e-9)"};
}

Outcome note_one() {
  const Setup s = setup(Preset::Toro123, 100, 0.5, 10);
  SchemeConfig ec = upwind_es(1e-12);
  ec.temporal = {TemporalFluxType::RoeEC, std::nullopt};
  const AdvanceResult up = advance(s.ic, Scheme(upwind_es(1e-12)), s.grid, CouplingMode::causal());
  const AdvanceResult e = advance(s.ic, Scheme(ec), s.grid, CouplingMode::full());
  auto first_interior = [&](const AdvanceResult& r) {
    double sum = 0.0;
    for (double v : r.budget.slabs[0].upper_temporal_production) sum += v * s.grid.dx;
    return sum;
  };
  const double pu = first_interior(up), pe = first_interior(e);
  return {pu > 0.0 && pe <= 1e-10,
          "production at first interior temporal interface: upwind " + fmt("%.3e", pu) +
              " (> 0), EC " + fmt("%.3e", pe) + " (<= 1e-10)"};
}

Outcome convergence() {
  double l1[3];
  const int ns[3] = {50, 100, 200};
  for (int i = 0; i < 3; ++i) {
    const Setup s = setup(Preset::DensityWave, ns[i], 0.5, 0);
    const Trajectory t = march(s.ic, Scheme(upwind_es(1e-10)), s.grid, CouplingMode::causal());
    const double time = s.grid.dt * s.grid.n_slabs;
    l1[i] = error_norms(t.slabs.back().cells, s.grid,
                        [&](double x) { return s.problem.exact(x, time); }, s.problem.gas)
                .l1[0];
  }
  const double o1 = std::log2(l1[0] / l1[1]), o2 = std::log2(l1[1] / l1[2]);
  return {o1 >= 0.8 && o2 >= 0.8,
          "L1(rho) " + fmt("%.4e", l1[0]) + ", " + fmt("%.4e", l1[1]) + ", " + fmt("%.4e", l1[2]) +
              "; observed orders 50->100 " + fmt("%.3f", o1) + ", 100->200 " + fmt("%.3f", o2) +
              " (need >= 0.8 each)"};
}

Outcome determinism() {
  const Setup s = setup(Preset::Sod, 100, 0.5, 20, Boundary::Periodic);
  bool same_block = true, same_repeat = true;
  for (const auto& cfg : {upwind_es(1e-10), ec_space_ec_time(1e-10)}) {
    const Scheme scheme(cfg);
    const Trajectory a = march(s.ic, scheme, s.grid, CouplingMode::causal());
    const Trajectory b = march(s.ic, scheme, s.grid, CouplingMode::block(1));
    const Trajectory c = march(s.ic, scheme, s.grid, CouplingMode::causal());
    for (int n = 0; n < s.grid.n_slabs; ++n) {
      same_block = same_block && a.slabs[n].cells == b.slabs[n].cells;
      same_repeat = same_repeat && a.slabs[n].cells == c.slabs[n].cells;
    }
  }
  return {same_block && same_repeat,
          std::string("BlockCoupled(1) vs causal bitwise ") + (same_block ? "equal" : "DIFFERENT") +
              ", repeated runs " + (same_repeat ? "equal" : "DIFFERENT")};
}

}  // namespace

int main() {
  criterion("AC1", "Roe EC conditions", 1,
            [] { return from_report(verify_ec_conditions({})); });
  criterion("AC2", "Quadrature EC fluxes", 1, quadrature_ec);
  criterion("AC3", "Upwind decomposition", 1,
            [] { return from_report(verify_upwind_decomposition_suite({})); });
  criterion("AC4", "Temporal Jacobian", 5, [] { return from_report(verify_spd({})); });
  criterion("AC5", "Entropy conservation", 60, entropy_conservation);
  criterion("AC6", "Entropy stability (Sod)", 60, [] { return entropy_stability(Preset::Sod); });
  criterion("AC6", "Entropy stability (Toro123)", 60,
            [] { return entropy_stability(Preset::Toro123); });
  criterion("AC7", "Temporal production at first interface", 60, note_one);
  criterion("AC8", "Convergence order", 120, convergence);
  criterion("AC9", "Degeneracy and determinism", 30, determinism);
  std::printf("%d criterion line(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
