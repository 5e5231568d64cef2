#include <cmath>

#include <gtest/gtest.h>

#include "stfv/advance.hpp"
#include "stfv/problems.hpp"

using namespace stfv;

namespace {

const GasParams kAir{};

// Rankine-Hugoniot residual |[f] - s [u]| across a discontinuity of speed s.
double rh_defect(const PrimState& a, const PrimState& b, double s) {
  const Vec3 d = (physical_flux(b, kAir) - physical_flux(a, kAir)) -
                 s * (prim_to_cons(b, kAir).vec() - prim_to_cons(a, kAir).vec());
  return norm_inf(d);
}

double run_density_wave_l1(int n, double cfl) {
  const Problem pr = make_preset(Preset::DensityWave);
  SpaceTimeGrid g = make_grid(pr, n, 1.0, 1);
  const SlabStates ic = cell_means(pr, g);
  const double dt0 = dt_for_cfl(cfl, g.dx, ic, pr.gas);
  g.n_slabs = static_cast<int>(std::ceil(pr.t_final / dt0 - 1e-9));
  g.dt = pr.t_final / g.n_slabs;
  const Trajectory t = march(ic, Scheme(SchemeConfig{}), g, CouplingMode::causal());
  const double time = g.dt * g.n_slabs;
  return error_norms(t.slabs.back().cells, g, [&](double x) { return pr.exact(x, time); }, pr.gas)
      .l1[0];
}

}  // namespace

TEST(Presets, NamesRoundTrip) {
  for (Preset p : kAllPresets) EXPECT_EQ(parse_preset(to_string(p)), p);
  EXPECT_FALSE(parse_preset("lax").has_value());
}

TEST(Presets, InitialStates) {
  const SpaceTimeGrid g = make_grid(make_preset(Preset::Toro123), 100, 0.001, 1);
  const SlabStates toro = preset_ic(Preset::Toro123, g);
  const PrimState left = cons_to_prim(toro.front(), kAir);
  EXPECT_DOUBLE_EQ(left.rho, 1.0);
  EXPECT_DOUBLE_EQ(left.u, -2.0);
  EXPECT_NEAR(left.p, 0.4, 1e-15);
  const PrimState right = cons_to_prim(toro.back(), kAir);
  EXPECT_DOUBLE_EQ(right.u, 2.0);

  for (const ConsState& c : preset_ic(Preset::Constant, g)) EXPECT_EQ(c, prim_to_cons({1, 0, 1}, kAir));

  const Problem dw = make_preset(Preset::DensityWave);
  EXPECT_NEAR(dw.initial(0.25).rho, 1.2, 1e-15);
  EXPECT_EQ(dw.initial(0.25).u, 1.0);
  EXPECT_EQ(dw.boundary, Boundary::Periodic);
  EXPECT_EQ(dw.t_final, 1.0);

  const Problem sod = make_preset(Preset::Sod);
  EXPECT_EQ(sod.riemann.left, (PrimState{1, 0, 1}));
  EXPECT_EQ(sod.riemann.right, (PrimState{0.125, 0, 0.1}));
  EXPECT_EQ(sod.t_final, 0.2);
  EXPECT_EQ(make_preset(Preset::Toro123).t_final, 0.15);
}

TEST(ExactRiemann, EqualStates) {
  const PrimState w{0.7, 0.3, 1.4};
  for (double xi : {-3.0, -0.1, 0.0, 0.3, 2.0}) {
    const PrimState s = exact_riemann(w, w, xi, kAir);
    EXPECT_NEAR(s.rho, w.rho, 1e-12);
    EXPECT_NEAR(s.u, w.u, 1e-12);
    EXPECT_NEAR(s.p, w.p, 1e-12);
  }
}

TEST(ExactRiemann, SodStarState) {
  const PrimState L{1, 0, 1}, R{0.125, 0, 0.1};
  const RiemannStar star = riemann_star(L, R, kAir);
  EXPECT_NEAR(star.p, 0.30313, 1e-5);
  EXPECT_NEAR(star.u, 0.92745, 1e-5);
  const PrimState c = exact_riemann(L, R, 0.0, kAir);
  EXPECT_NEAR(c.p, star.p, 1e-14);
  EXPECT_NEAR(c.u, star.u, 1e-14);
}

TEST(ExactRiemann, SodWaveRelations) {
  const PrimState L{1, 0, 1}, R{0.125, 0, 0.1};
  const RiemannStar star = riemann_star(L, R, kAir);
  // Right shock: Rankine-Hugoniot with the shock speed from mass conservation.
  const PrimState post{star.rho_right, star.u, star.p};
  const double s = (post.rho * post.u - R.rho * R.u) / (post.rho - R.rho);
  EXPECT_LE(rh_defect(R, post, s), 1e-10);
  // Sampled states bracket the shock.
  EXPECT_NEAR(exact_riemann(L, R, s - 1e-9, kAir).rho, post.rho, 1e-10);
  EXPECT_NEAR(exact_riemann(L, R, s + 1e-9, kAir).rho, R.rho, 1e-10);
  // Contact: pressure and velocity continuous.
  const PrimState cl = exact_riemann(L, R, star.u - 1e-9, kAir);
  const PrimState cr = exact_riemann(L, R, star.u + 1e-9, kAir);
  EXPECT_NEAR(cl.p, cr.p, 1e-10);
  EXPECT_NEAR(cl.u, cr.u, 1e-10);
  // Left rarefaction: isentropic and Riemann invariant u + 2a/(gamma-1) constant.
  for (double xi : {-1.1, -0.8, -0.5, -0.2}) {
    const PrimState w = exact_riemann(L, R, xi, kAir);
    EXPECT_NEAR(specific_entropy(w, kAir), specific_entropy(L, kAir), 1e-10);
    EXPECT_NEAR(w.u + 2 * sound_speed(w, kAir) / (kAir.gamma - 1),
                L.u + 2 * sound_speed(L, kAir) / (kAir.gamma - 1), 1e-10);
  }
}

TEST(ExactRiemann, Toro123SymmetricTwoRarefactions) {
  const PrimState L{1, -2, 0.4}, R{1, 2, 0.4};
  const PrimState mid = exact_riemann(L, R, 0.0, kAir);
  EXPECT_NEAR(mid.u, 0.0, 1e-12);
  EXPECT_LT(mid.p, 0.4);
  for (double s : {0.05, 0.2, 0.5, 1.0, 3.0}) {
    const PrimState a = exact_riemann(L, R, s, kAir), b = exact_riemann(L, R, -s, kAir);
    EXPECT_NEAR(a.rho, b.rho, 1e-10);
    EXPECT_NEAR(a.u, -b.u, 1e-10);
    EXPECT_NEAR(specific_entropy(a, kAir), specific_entropy(L, kAir), 1e-10);
  }
}

TEST(ExactRiemann, VacuumIsReported) {
  EXPECT_THROW(riemann_star({1, -10, 0.4}, {1, 10, 0.4}, kAir), VacuumError);
}

TEST(Norms, ExactDataGivesZero) {
  const Problem pr = make_preset(Preset::DensityWave);
  const SpaceTimeGrid g = make_grid(pr, 50, 0.01, 1);
  const ErrorNorms n =
      error_norms(cell_means(pr, g), g, [&](double x) { return pr.exact(x, 0.0); }, pr.gas);
  for (int k = 0; k < 3; ++k) {
    EXPECT_LE(n.l1[k], 1e-15);
    EXPECT_LE(n.l2[k], 1e-15);
    EXPECT_LE(n.linf[k], 1e-15);
  }
}

TEST(Norms, DensityWaveExactIsPeriodicTranslation) {
  const Problem pr = make_preset(Preset::DensityWave);
  EXPECT_NEAR(pr.exact(0.25, 1.0).rho, 1.2, 1e-14);
  EXPECT_NEAR(pr.exact(0.75, 0.5).rho, 1.2, 1e-14);
}

TEST(Convergence, DensityWaveRatio100To200) {
  const double e100 = run_density_wave_l1(100, 0.5);
  const double e200 = run_density_wave_l1(200, 0.5);
  std::cout << "[ info ] L1(100) = " << e100 << ", L1(200) = " << e200
            << ", ratio = " << e100 / e200 << "\n";
  EXPECT_GE(e100 / e200, 1.7);
  EXPECT_LE(e100 / e200, 2.3);
}

TEST(Overheating, Toro123UpwindPositive) {
  const Problem pr = make_preset(Preset::Toro123);
  SpaceTimeGrid g = make_grid(pr, 100, 1.0, 1);
  const SlabStates ic = cell_means(pr, g);
  const double dt0 = dt_for_cfl(0.5, g.dx, ic, pr.gas);
  g.n_slabs = static_cast<int>(std::ceil(pr.t_final / dt0 - 1e-9));
  g.dt = pr.t_final / g.n_slabs;
  const Trajectory t = march(ic, Scheme(SchemeConfig{}), g, CouplingMode::causal());
  const double m = overheating_metric(t.slabs.back().cells, g, pr, g.dt * g.n_slabs);
  std::cout << "[ info ] Toro123 overheating metric: " << m << "\n";
  EXPECT_GT(m, 0.0);
}

TEST(Overheating, RequiresRiemannProblem) {
  const Problem pr = make_preset(Preset::Constant);
  const SpaceTimeGrid g = make_grid(pr, 10, 0.1, 1);
  EXPECT_THROW(overheating_metric(cell_means(pr, g), g, pr, 0.1), DomainError);
}
