/// JSON run configuration for the command-line runner.
///
/// A config names a problem (a preset or an explicit Riemann problem), a grid,
/// the scheme, a coupling mode, Newton settings and output options. Parsing
/// resolves every derived quantity (dt, n_slabs, boundary) so that the echo
/// produced by `to_json` reproduces the run exactly when parsed again.
#pragma once

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "stfv/advance.hpp"
#include "stfv/problems.hpp"

namespace stfv {

using Json = nlohmann::ordered_json;

struct OutputOptions {
  std::string directory = "out";
  std::vector<int> snapshots{-1};  // slab indices; negative counts from the end
};

struct RunConfig {
  Problem problem;
  std::string preset;  // empty for an explicit Riemann problem
  SpaceTimeGrid grid;
  std::optional<double> cfl;  // recorded when dt was derived from it
  SchemeConfig scheme;
  CouplingMode coupling = CouplingMode::causal();
  OutputOptions output;
};

namespace detail {

inline std::string child(const std::string& path, const std::string& key) {
  return path + "/" + key;
}

inline void reject_unknown(const Json& obj, const std::string& path,
                           std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(path, "expected an object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [k, v] : obj.items()) {
    if (!keys.count(k)) throw ConfigError(child(path, k), "unknown key");
  }
}

inline double get_number(const Json& obj, const std::string& path, const char* key) {
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(child(path, key), "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(child(path, key), "must be finite");
  return d;
}

inline double number_or(const Json& obj, const std::string& path, const char* key,
                        double fallback) {
  return obj.contains(key) ? get_number(obj, path, key) : fallback;
}

inline int get_int(const Json& obj, const std::string& path, const char* key) {
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(child(path, key), "expected an integer");
  return v.get<int>();
}

inline int int_or(const Json& obj, const std::string& path, const char* key, int fallback) {
  return obj.contains(key) ? get_int(obj, path, key) : fallback;
}

inline std::string get_string(const Json& obj, const std::string& path, const char* key) {
  const auto& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(child(path, key), "expected a string");
  return v.get<std::string>();
}

inline PrimState parse_prim(const Json& j, const std::string& path) {
  reject_unknown(j, path, {"rho", "u", "p"});
  for (const char* k : {"rho", "u", "p"})
    if (!j.contains(k)) throw ConfigError(child(path, k), "missing");
  PrimState w{get_number(j, path, "rho"), get_number(j, path, "u"), get_number(j, path, "p")};
  if (!is_admissible(w)) throw ConfigError(path, "density and pressure must be positive");
  return w;
}

inline Boundary parse_boundary(const Json& obj, const std::string& path, const char* key) {
  const std::string s = get_string(obj, path, key);
  if (s == "periodic") return Boundary::Periodic;
  if (s == "transmissive") return Boundary::Transmissive;
  throw ConfigError(child(path, key), "expected \"periodic\" or \"transmissive\", got \"" + s +
                                          "\"");
}

inline Problem parse_problem(const Json& j, std::string& preset_name) {
  const std::string path = "/problem";
  reject_unknown(j, path, {"preset", "riemann"});
  if (j.contains("preset") == j.contains("riemann")) {
    throw ConfigError(path, "give exactly one of \"preset\" or \"riemann\"");
  }
  if (j.contains("preset")) {
    preset_name = get_string(j, path, "preset");
    const auto p = parse_preset(preset_name);
    if (!p) throw ConfigError(child(path, "preset"), "unknown preset \"" + preset_name + "\"");
    return make_preset(*p);
  }
  const std::string rp = child(path, "riemann");
  const Json& r = j.at("riemann");
  reject_unknown(r, rp, {"left", "right", "x0", "x_left", "x_right", "t_final", "boundary"});
  for (const char* k : {"left", "right", "x0", "t_final"})
    if (!r.contains(k)) throw ConfigError(child(rp, k), "missing");
  Problem pr;
  pr.kind = Problem::Kind::Riemann;
  pr.name = "riemann";
  pr.riemann.left = parse_prim(r.at("left"), child(rp, "left"));
  pr.riemann.right = parse_prim(r.at("right"), child(rp, "right"));
  pr.riemann.x0 = get_number(r, rp, "x0");
  pr.x_left = number_or(r, rp, "x_left", 0.0);
  pr.x_right = number_or(r, rp, "x_right", 1.0);
  pr.t_final = get_number(r, rp, "t_final");
  pr.boundary = r.contains("boundary") ? parse_boundary(r, rp, "boundary")
                                       : Boundary::Transmissive;
  if (!(pr.x_left < pr.riemann.x0 && pr.riemann.x0 < pr.x_right)) {
    throw ConfigError(child(rp, "x0"), "need x_left < x0 < x_right");
  }
  if (!(pr.t_final > 0.0)) throw ConfigError(child(rp, "t_final"), "must be positive");
  return pr;
}

inline std::optional<DissipationSpec> parse_dissipation(const Json& parent,
                                                        const std::string& ppath,
                                                        Direction dir) {
  if (!parent.contains("dissipation") || parent.at("dissipation").is_null()) return std::nullopt;
  const std::string path = child(ppath, "dissipation");
  const Json& d = parent.at("dissipation");
  reject_unknown(d, path, {"kind", "scale", "theta", "quadrature_order"});
  if (!d.contains("kind")) throw ConfigError(child(path, "kind"), "missing");
  const std::string kind = get_string(d, path, "kind");
  DissipationSpec spec;
  if (kind == "scalar_times_h") {
    spec = DissipationSpec::scalar_times_h();
    spec.scale = number_or(d, path, "scale", spec.scale);
  } else if (kind == "theta_times_h") {
    if (!d.contains("theta")) throw ConfigError(child(path, "theta"), "missing");
    spec = DissipationSpec::theta_times_h(get_number(d, path, "theta"));
  } else if (kind == "upwind_equivalent") {
    spec = DissipationSpec::upwind_equivalent(int_or(d, path, "quadrature_order", 8));
  } else {
    throw ConfigError(child(path, "kind"), "unknown dissipation kind \"" + kind + "\"");
  }
  if (spec.applies_to != dir) {
    throw ConfigError(child(path, "kind"), "\"" + kind + "\" cannot be used in " +
                                               std::string(to_string(dir)));
  }
  try {
    validate(spec);
  } catch (const DissipationSpecError& e) {
    throw ConfigError(path, e.what());
  }
  return spec;
}

inline SchemeConfig parse_scheme(const Json& j, const GasParams& gas) {
  const std::string path = "/scheme";
  reject_unknown(j, path, {"spatial", "temporal", "quadrature_order", "ledger_quadrature_order"});
  SchemeConfig cfg;
  cfg.gas = gas;
  if (j.contains("spatial")) {
    const std::string sp = child(path, "spatial");
    const Json& s = j.at("spatial");
    reject_unknown(s, sp, {"flux", "dissipation"});
    const std::string flux = s.contains("flux") ? get_string(s, sp, "flux") : "roe";
    if (flux == "roe") cfg.spatial.base = EcFamily::Roe;
    else if (flux == "tadmor") cfg.spatial.base = EcFamily::Tadmor;
    else throw ConfigError(child(sp, "flux"), "expected \"roe\" or \"tadmor\"");
    cfg.spatial.dissipation = s.contains("dissipation")
                                  ? parse_dissipation(s, sp, Direction::Space)
                                  : DissipationSpec::scalar_times_h();
  }
  if (j.contains("temporal")) {
    const std::string tp = child(path, "temporal");
    const Json& t = j.at("temporal");
    reject_unknown(t, tp, {"flux", "dissipation"});
    const std::string flux = t.contains("flux") ? get_string(t, tp, "flux") : "upwind";
    if (flux == "upwind") cfg.temporal.type = TemporalFluxType::Upwind;
    else if (flux == "roe") cfg.temporal.type = TemporalFluxType::RoeEC;
    else if (flux == "tadmor") cfg.temporal.type = TemporalFluxType::TadmorEC;
    else throw ConfigError(child(tp, "flux"), "expected \"upwind\", \"roe\" or \"tadmor\"");
    cfg.temporal.dissipation = parse_dissipation(t, tp, Direction::Time);
    if (cfg.temporal.dissipation && cfg.temporal.type == TemporalFluxType::Upwind) {
      throw ConfigError(child(tp, "dissipation"), "the upwind temporal flux takes no dissipation");
    }
  }
  cfg.quadrature_order = int_or(j, path, "quadrature_order", cfg.quadrature_order);
  cfg.ledger_quadrature_order =
      int_or(j, path, "ledger_quadrature_order", cfg.ledger_quadrature_order);
  if (cfg.quadrature_order < 1) throw ConfigError(child(path, "quadrature_order"), "must be >= 1");
  if (cfg.ledger_quadrature_order < 1) {
    throw ConfigError(child(path, "ledger_quadrature_order"), "must be >= 1");
  }
  return cfg;
}

inline NewtonSettings parse_newton(const Json& j) {
  const std::string path = "/newton";
  reject_unknown(j, path, {"abs_tol", "rel_tol", "max_iterations", "damping", "max_halvings"});
  NewtonSettings n;
  n.abs_tol = number_or(j, path, "abs_tol", n.abs_tol);
  n.rel_tol = number_or(j, path, "rel_tol", n.rel_tol);
  n.max_iterations = int_or(j, path, "max_iterations", n.max_iterations);
  n.damping = number_or(j, path, "damping", n.damping);
  n.max_halvings = int_or(j, path, "max_halvings", n.max_halvings);
  if (!(n.abs_tol > 0.0)) throw ConfigError(child(path, "abs_tol"), "must be positive");
  if (!(n.rel_tol >= 0.0)) throw ConfigError(child(path, "rel_tol"), "must be non-negative");
  if (n.max_iterations < 1) throw ConfigError(child(path, "max_iterations"), "must be >= 1");
  if (!(n.damping > 0.0 && n.damping <= 1.0)) {
    throw ConfigError(child(path, "damping"), "must lie in (0, 1]");
  }
  if (n.max_halvings < 0) throw ConfigError(child(path, "max_halvings"), "must be >= 0");
  return n;
}

inline CouplingMode parse_coupling(const Json& j) {
  const std::string path = "/coupling";
  reject_unknown(j, path, {"mode", "block_size"});
  const std::string mode = j.contains("mode") ? get_string(j, path, "mode") : "causal";
  if (mode == "causal") return CouplingMode::causal();
  if (mode == "full") return CouplingMode::full();
  if (mode == "block") {
    if (!j.contains("block_size")) throw ConfigError(child(path, "block_size"), "missing");
    const int k = get_int(j, path, "block_size");
    if (k < 1) throw ConfigError(child(path, "block_size"), "must be >= 1");
    return CouplingMode::block(k);
  }
  throw ConfigError(child(path, "mode"), "expected \"causal\", \"block\" or \"full\"");
}

inline void resolve_grid(const Json& j, RunConfig& rc) {
  const std::string path = "/grid";
  reject_unknown(j, path, {"n_cells", "dt", "cfl", "n_slabs", "t_final", "boundary"});
  if (!j.contains("n_cells")) throw ConfigError(child(path, "n_cells"), "missing");
  const Problem& pr = rc.problem;
  const int n_cells = get_int(j, path, "n_cells");
  if (n_cells < 3) throw ConfigError(child(path, "n_cells"), "need at least 3 cells");
  if (j.contains("boundary")) rc.problem.boundary = parse_boundary(j, path, "boundary");
  if (j.contains("dt") && j.contains("cfl")) {
    throw ConfigError(path, "give at most one of \"dt\" and \"cfl\"");
  }
  const bool has_slabs = j.contains("n_slabs");
  const bool has_tfinal = j.contains("t_final");
  int n_slabs = has_slabs ? get_int(j, path, "n_slabs") : 0;
  if (has_slabs && n_slabs < 1) throw ConfigError(child(path, "n_slabs"), "must be >= 1");
  const double t_final = has_tfinal ? get_number(j, path, "t_final") : pr.t_final;
  if (!(t_final > 0.0)) throw ConfigError(child(path, "t_final"), "must be positive");

  SpaceTimeGrid grid = make_grid(rc.problem, n_cells, 1.0, 1);
  double dt = 0.0;
  if (j.contains("dt")) {
    dt = get_number(j, path, "dt");
    if (!(dt > 0.0)) throw ConfigError(child(path, "dt"), "must be positive");
  } else if (!(has_slabs && has_tfinal)) {
    const double cfl = number_or(j, path, "cfl", 0.5);
    if (!(cfl > 0.0)) throw ConfigError(child(path, "cfl"), "must be positive");
    rc.cfl = cfl;
    dt = dt_for_cfl(cfl, grid.dx, cell_means(rc.problem, grid), pr.gas);
  }

  if (has_slabs && has_tfinal) {
    if (j.contains("cfl")) {
      throw ConfigError(child(path, "cfl"), "over-determined: n_slabs and t_final fix dt");
    }
    const double derived = t_final / n_slabs;
    if (dt > 0.0 && std::fabs(dt - derived) > 1e-12 * derived) {
      throw ConfigError(path, "inconsistent: t_final != n_slabs * dt");
    }
    if (dt == 0.0) dt = derived;
  } else if (!has_slabs) {
    n_slabs = static_cast<int>(std::ceil(t_final / dt - 1e-9));
    n_slabs = std::max(n_slabs, 1);
    if (!j.contains("dt")) dt = t_final / n_slabs;
  }
  grid.dt = dt;
  grid.n_slabs = n_slabs;
  rc.grid = grid;
}

inline int line_of_offset(const std::string& text, std::size_t offset) {
  int line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

}  // namespace detail

/// Parse a configuration from JSON text. Syntax errors report a line number;
/// semantic errors report the JSON pointer of the offending field.
inline RunConfig parse_run_config(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError("", e.what(), detail::line_of_offset(text, e.byte));
  }
  detail::reject_unknown(j, "", {"problem", "gamma", "grid", "scheme", "coupling", "newton",
                                 "output"});
  for (const char* k : {"problem", "grid"})
    if (!j.contains(k)) throw ConfigError(std::string("/") + k, "missing");

  RunConfig rc;
  rc.problem = detail::parse_problem(j.at("problem"), rc.preset);
  if (j.contains("gamma")) {
    rc.problem.gas.gamma = detail::get_number(j, "", "gamma");
    if (!(rc.problem.gas.gamma > 1.0)) throw ConfigError("/gamma", "must exceed 1");
  }
  detail::resolve_grid(j.at("grid"), rc);
  if (j.contains("scheme")) {
    rc.scheme = detail::parse_scheme(j.at("scheme"), rc.problem.gas);
  } else {
    rc.scheme = SchemeConfig{};
    rc.scheme.gas = rc.problem.gas;
  }
  if (j.contains("newton")) rc.scheme.newton = detail::parse_newton(j.at("newton"));
  if (j.contains("coupling")) rc.coupling = detail::parse_coupling(j.at("coupling"));
  if (j.contains("output")) {
    const Json& o = j.at("output");
    detail::reject_unknown(o, "/output", {"directory", "snapshots"});
    if (o.contains("directory")) rc.output.directory = detail::get_string(o, "/output", "directory");
    if (o.contains("snapshots")) {
      const Json& s = o.at("snapshots");
      if (!s.is_array()) throw ConfigError("/output/snapshots", "expected an array of integers");
      rc.output.snapshots.clear();
      for (std::size_t i = 0; i < s.size(); ++i) {
        const std::string p = "/output/snapshots/" + std::to_string(i);
        if (!s[i].is_number_integer()) throw ConfigError(p, "expected an integer");
        const int idx = s[i].get<int>();
        if (idx >= rc.grid.n_slabs || idx < -rc.grid.n_slabs) {
          throw ConfigError(p, "slab index out of range");
        }
        rc.output.snapshots.push_back(idx);
      }
    }
  }
  try {
    validate(rc.scheme);
  } catch (const Error& e) {
    throw ConfigError("/scheme", e.what());
  }
  return rc;
}

inline RunConfig load_run_config(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("", "cannot read config file " + file);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

namespace detail {

inline Json to_json(const PrimState& w) { return Json{{"rho", w.rho}, {"u", w.u}, {"p", w.p}}; }

inline Json to_json(const std::optional<DissipationSpec>& d) {
  if (!d) return nullptr;
  Json j{{"kind", std::string(to_string(d->kind))}};
  switch (d->kind) {
    case DissipationKind::ScalarTimesH: j["scale"] = d->scale; break;
    case DissipationKind::ThetaTimesH: j["theta"] = d->theta; break;
    case DissipationKind::UpwindEquivalentIntegral:
      j["quadrature_order"] = d->quadrature_order;
      break;
  }
  return j;
}

}  // namespace detail

/// Fully resolved configuration. Parsing it yields the same run.
inline Json to_json(const RunConfig& rc) {
  Json problem;
  if (!rc.preset.empty()) {
    problem["preset"] = rc.preset;
  } else {
    const Problem& p = rc.problem;
    problem["riemann"] = Json{{"left", detail::to_json(p.riemann.left)},
                              {"right", detail::to_json(p.riemann.right)},
                              {"x0", p.riemann.x0},
                              {"x_left", p.x_left},
                              {"x_right", p.x_right},
                              {"t_final", p.t_final},
                              {"boundary", std::string(to_string(p.boundary))}};
  }
  const SchemeConfig& s = rc.scheme;
  Json coupling{{"mode", std::string(to_string(rc.coupling.kind))}};
  if (rc.coupling.kind == CouplingMode::Kind::BlockCoupled) {
    coupling["block_size"] = rc.coupling.block_size;
  }
  return Json{
      {"problem", problem},
      {"gamma", rc.problem.gas.gamma},
      {"grid",
       {{"n_cells", rc.grid.n_cells},
        {"dt", rc.grid.dt},
        {"n_slabs", rc.grid.n_slabs},
        {"boundary", std::string(to_string(rc.grid.boundary))}}},
      {"scheme",
       {{"spatial",
         {{"flux", std::string(to_string(s.spatial.base))},
          {"dissipation", detail::to_json(s.spatial.dissipation)}}},
        {"temporal",
         {{"flux", std::string(to_string(s.temporal.type))},
          {"dissipation", detail::to_json(s.temporal.dissipation)}}},
        {"quadrature_order", s.quadrature_order},
        {"ledger_quadrature_order", s.ledger_quadrature_order}}},
      {"coupling", coupling},
      {"newton",
       {{"abs_tol", s.newton.abs_tol},
        {"rel_tol", s.newton.rel_tol},
        {"max_iterations", s.newton.max_iterations},
        {"damping", s.newton.damping},
        {"max_halvings", s.newton.max_halvings}}},
      {"output", {{"directory", rc.output.directory}, {"snapshots", rc.output.snapshots}}}};
}

}  // namespace stfv
