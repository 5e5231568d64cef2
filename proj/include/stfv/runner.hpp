/// Executes a RunConfig and writes snapshot CSVs, the entropy-budget CSV and
/// a JSON summary.
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "stfv/run_config.hpp"

namespace stfv {

/// Shortest-safe round-trip formatting: 17 significant digits.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct RunOutcome {
  AdvanceResult result;
  Json summary;
  std::vector<std::filesystem::path> files;
};

inline std::string snapshot_csv(const SlabStates& cells, const SpaceTimeGrid& grid,
                                const GasParams& g) {
  std::string out = "x,rho,u,p,S,U\n";
  for (int j = 0; j < grid.n_cells; ++j) {
    const PrimState w = cons_to_prim(cells[j], g);
    const double fields[] = {grid.cell_center(j), w.rho, w.u, w.p, specific_entropy(w, g),
                             entropy_pair(w, g).U};
    for (int k = 0; k < 6; ++k) {
      out += format_double(fields[k]);
      out += k < 5 ? ',' : '\n';
    }
  }
  return out;
}

inline std::string budget_csv(const EntropyBudget& b) {
  std::string out =
      "slab_index,t,total_U,total_rhoS,temporal_production,spatial_production,"
      "max_cell_residual\n";
  for (const auto& s : b.slabs) {
    out += std::to_string(s.slab);
    for (double v : {s.t, s.total_U, s.total_rhoS, s.temporal_production, s.spatial_production,
                     s.max_cell_residual}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

namespace detail {

inline Json vec_json(const Vec3& v) { return Json::array({v[0], v[1], v[2]}); }

inline Json norms_json(const Vec3& v) {
  return Json{{"rho", v[0]}, {"u", v[1]}, {"p", v[2]}};
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << text;
  if (!f) throw std::runtime_error("failed writing " + p.string());
}

}  // namespace detail

/// Summary of a finished run. `monotone_total_U_decrease` allows a slack of
/// 1e-12 * max(1, |U|) per interface for roundoff.
inline Json summarize(const RunConfig& rc, const AdvanceResult& r) {
  const EntropyBudget& b = r.budget;
  const auto& slabs = r.trajectory.slabs;
  const SpaceTimeGrid& grid = rc.grid;
  const GasParams& g = rc.problem.gas;

  Json conservation;
  const Vec3 init = b.initial_conserved_totals;
  const Vec3 fin = b.slabs.back().conserved_totals;
  Vec3 drift{};
  for (const auto& s : b.slabs)
    for (int k = 0; k < 3; ++k)
      drift[k] = std::max(drift[k], std::fabs(s.conserved_totals[k] - init[k]) /
                                        std::max(1.0, std::fabs(init[k])));
  conservation["initial_totals"] = detail::vec_json(init);
  conservation["final_totals"] = detail::vec_json(fin);
  conservation["final_delta"] = detail::vec_json(fin - init);
  conservation["max_relative_drift"] = detail::vec_json(drift);

  const auto series = global_entropy_series(b);
  bool monotone = true;
  double max_increase = -INFINITY;
  for (std::size_t i = 1; i < series.size(); ++i) {
    const double inc = series[i] - series[i - 1];
    max_increase = std::max(max_increase, inc);
    if (inc > 1e-12 * std::max(1.0, std::fabs(series[i - 1]))) monotone = false;
  }
  Json entropy{{"initial_data_U", b.initial_data_U},
               {"initial_total_U", b.initial_total_U},
               {"initial_interface_production", b.initial_interface_production},
               {"final_total_U", series.back()},
               {"max_total_U_increase", max_increase},
               {"monotone_total_U_decrease", monotone},
               {"max_abs_cell_residual", b.max_abs_residual()},
               {"max_signed_cell_residual", b.max_signed_residual()},
               {"max_formula_mismatch", b.max_formula_mismatch()}};

  int total_iter = 0, max_iter = 0, rejected = 0, blocks = 0, continued = 0;
  double max_final = 0.0;
  for (std::size_t s = 0; s < slabs.size(); ++s) {
    if (!std::binary_search(r.trajectory.block_starts.begin(), r.trajectory.block_starts.end(),
                            static_cast<int>(s)))
      continue;
    const auto& nd = slabs[s].newton;
    ++blocks;
    total_iter += nd.iterations;
    max_iter = std::max(max_iter, nd.iterations);
    rejected += nd.rejected_steps;
    if (nd.continuation_stages > 0) ++continued;
    max_final = std::max(max_final, nd.final_residual);
  }
  Json newton{{"blocks", blocks},
              {"total_iterations", total_iter},
              {"max_iterations", max_iter},
              {"rejected_steps", rejected},
              {"blocks_solved_by_continuation", continued},
              {"max_final_residual", max_final}};

  const double t_end = grid.dt * grid.n_slabs;
  Json summary{{"config", to_json(rc)},
               {"grid",
                {{"dx", grid.dx},
                 {"dt", grid.dt},
                 {"lambda", grid.lambda()},
                 {"t_final", t_end},
                 {"cfl", grid.lambda() * max_wave_speed(r.trajectory.initial, g)}}},
               {"conservation", conservation},
               {"entropy", entropy},
               {"newton", newton}};

  const Problem& pr = rc.problem;
  const bool has_oracle =
      pr.kind != Problem::Kind::Riemann || grid.boundary == Boundary::Transmissive;
  if (has_oracle) {
    const ErrorNorms n = error_norms(slabs.back().cells, grid,
                                     [&](double x) { return pr.exact(x, t_end); }, g);
    summary["error_norms"] = Json{{"t", t_end},
                                  {"l1", detail::norms_json(n.l1)},
                                  {"l2", detail::norms_json(n.l2)},
                                  {"linf", detail::norms_json(n.linf)}};
  } else {
    summary["error_norms"] = nullptr;
  }
  if (pr.kind == Problem::Kind::Riemann) {
    summary["overheating_metric"] = overheating_metric(slabs.back().cells, grid, pr, t_end);
  }
  return summary;
}

/// Run the solver and ledger and write every output file.
inline RunOutcome execute(const RunConfig& rc) {
  namespace fs = std::filesystem;
  RunOutcome out;
  const Scheme scheme(rc.scheme);
  const SlabStates ic = cell_means(rc.problem, rc.grid);
  out.result = advance(ic, scheme, rc.grid, rc.coupling);
  out.summary = summarize(rc, out.result);

  const fs::path dir(rc.output.directory);
  fs::create_directories(dir);
  const int n_slabs = rc.grid.n_slabs;
  std::set<int> written;
  for (int idx : rc.output.snapshots) {
    const int s = idx < 0 ? n_slabs + idx : idx;
    if (!written.insert(s).second) continue;
    char name[40];
    std::snprintf(name, sizeof name, "snapshot_%06d.csv", s);
    out.files.push_back(dir / name);
    detail::write_file(out.files.back(), snapshot_csv(out.result.trajectory.slabs[s].cells,
                                                      rc.grid, rc.problem.gas));
  }
  out.files.push_back(dir / "budget.csv");
  detail::write_file(out.files.back(), budget_csv(out.result.budget));
  out.files.push_back(dir / "summary.json");
  detail::write_file(out.files.back(), out.summary.dump(2) + "\n");
  return out;
}

}  // namespace stfv
