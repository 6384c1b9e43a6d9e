#include "plateau/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <random>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "plateau/area.hpp"
#include "plateau/calibration.hpp"
#include "plateau/config.hpp"
#include "plateau/errors.hpp"
#include "plateau/graph.hpp"
#include "plateau/io.hpp"
#include "plateau/minimality.hpp"
#include "plateau/numeric.hpp"
#include "plateau/ruling.hpp"

namespace fs = std::filesystem;

namespace plateau {

namespace {

struct Options {
  std::string command;
  std::string config;
  std::optional<int> grid;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::vector<std::string> faults;
};

struct Faults {
  double mu_bar_offset = 0.0;
};

Faults parse_faults(const std::vector<std::string>& items) {
  Faults f;
  for (const auto& it : items) {
    const auto eq = it.find('=');
    if (eq == std::string::npos) throw PreconditionError(fmt::format("--fault expects K=V, got '{}'", it));
    const std::string key = it.substr(0, eq);
    const std::string val = it.substr(eq + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(val, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != val.size() || val.empty())
      throw PreconditionError(fmt::format("fault value '{}' is not a number", val));
    if (key == "mu_bar_offset")
      f.mu_bar_offset = v;
    else
      throw PreconditionError(fmt::format("unknown fault '{}' (known: mu_bar_offset)", key));
  }
  return f;
}

std::string gate_reason(const GateInfo& g, const ZetaReport& z) {
  return fmt::format("gate '{}' closed: zeta = {:.17g} is not < {} = {:.10f}", g.name, z.zeta,
                     g.closed_form.substr(g.closed_form.find('<') + 2), g.threshold);
}

const GateInfo& gate(const std::string& name) {
  for (const auto& g : gate_table())
    if (g.name == name) return g;
  throw PreconditionError(fmt::format("unknown gate {}", name));
}

// Stages of the construction and the gate each one needs.
struct Pipeline {
  CaseConfig cfg;
  PlateauProblem problem;
  std::optional<RulingSolver> solver;
  std::optional<GraphInverter> inv;
  std::optional<RuledSurface> surface;
  std::optional<GraphFunction> u;
  std::optional<RightDomainTable> table;
  std::optional<GraphFunction> ur;
  Json stages = Json::array();
  bool gate_blocked = false;

  bool stage(const std::string& name, const std::string& gate_name) {
    const auto& g = gate(gate_name);
    Json s{{"stage", name}, {"gate", g.name}, {"condition", g.closed_form}};
    if (problem.zeta.gate(gate_name)) {
      s["status"] = "ran";
      stages.push_back(s);
      return true;
    }
    s["status"] = "skipped";
    s["reason"] = gate_reason(g, problem.zeta);
    stages.push_back(s);
    gate_blocked = true;
    return false;
  }

  bool run_interp() {
    if (!stage("interpolation", "interp")) return false;
    solver.emplace(problem, cfg.tol);
    surface = build_ruled_surface(*solver, cfg.n_s, cfg.n_h);
    return true;
  }
  bool run_left() {
    if (!solver || !stage("left_graph", "left")) return false;
    inv.emplace(*solver);
    u = left_graph(*inv, {cfg.n_y, cfg.n_t});
    return true;
  }
  bool run_right() {
    if (!u || !stage("right_graph", "right")) return false;
    table = right_domain(*inv, *u);
    ur = right_graph(*inv, *table, cfg.n_t);
    return true;
  }
};

Json zeta_json(const Pipeline& p) {
  const auto& z = p.problem.zeta;
  Json gates = Json::array();
  for (const auto& g : gate_table())
    gates.push_back({{"name", g.name}, {"condition", g.closed_form}, {"threshold", g.threshold},
                     {"passed", z.gate(g.name)}});
  return Json{{"zeta", z.zeta},         {"gamma_sup", z.gamma_sup}, {"gamma_lip", z.gamma_lip},
              {"phi_sup", z.phi_sup},   {"phi_lip", z.phi_lip},     {"gates", gates},
              {"stages", p.stages}};
}

Json bump_json(const BumpSpec& b) {
  return {{"y0", b.y0}, {"t0", b.t0}, {"ry", b.ry}, {"rt", b.rt}, {"amplitude", b.amplitude}};
}

// Discrete |D| under the row quadrature of u: the lower bound A_H(u) must meet.
double row_lebesgue(const GraphFunction& u) {
  CompensatedSum acc;
  for (const auto& r : u.rows) acc.add(r.weight * (r.t_hi - r.t_lo));
  return acc.value();
}

Json area_json(const Pipeline& p, const ScalarField2D& B) {
  const double ad = h_area_domain(*p.u, B);
  const auto as = h_area_surface(*p.solver, *p.surface, p.cfg.gauss);
  const double leb = lebesgue_area(p.problem.domain);
  const double leb_rows = row_lebesgue(*p.u);
  return Json{{"area_domain", ad},
              {"area_surface", as.value},
              {"area_surface_skipped_cells", as.skipped_cells},
              {"area_surface_skipped_bound", as.skipped_bound},
              {"lebesgue", leb},
              {"lebesgue_rows", leb_rows},
              {"excess", ad - leb},
              {"area_at_least_lebesgue", ad >= leb_rows * (1.0 - 1e-14)},
              {"grid",
               {{"n_s", p.cfg.n_s}, {"n_h", p.cfg.n_h}, {"rows", p.u->rows.size()}, {"n_t", p.cfg.n_t},
                {"gauss", p.cfg.gauss}}},
              {"tolerances",
               {{"root", p.solver->tol()},
                {"boundary_residual", p.u->boundary_residual},
                {"max_inversion_residual", p.u->max_inversion_residual}}}};
}

fs::path out_dir(const CaseConfig& cfg) { return fs::path(cfg.out); }

int cmd_solve(Pipeline& p) {
  const fs::path dir = out_dir(p.cfg);
  fs::create_directories(dir);
  int code = kExitOk;
  if (p.run_interp()) {
    write_lambda_csv(dir / "lambda.csv", p.surface->lambda);
    export_mesh(*p.surface, dir / "surface.obj", dir / "surface_burgers.csv");
    if (p.run_left()) {
      write_graph_csv(dir / "u.csv", *p.u);
      const auto B = burgers_fd(*p.u);
      const auto area = area_json(p, B);
      write_json(dir / "area.json", area);
      if (!area["area_at_least_lebesgue"].get<bool>()) {
        fmt::print(stderr, "error: A_H(u) fell below the area of the domain\n");
        code = kExitError;
      }
      if (p.run_right()) write_graph_csv(dir / "u_right.csv", *p.ur);
    }
  }
  write_json(dir / "zeta.json", zeta_json(p));
  for (const auto& s : p.stages)
    fmt::print("{:<14} {}{}\n", s["stage"].get<std::string>(), s["status"].get<std::string>(),
               s.contains("reason") ? " (" + s["reason"].get<std::string>() + ")" : "");
  if (code != kExitOk) return code;
  return p.gate_blocked ? kExitGate : kExitOk;
}

struct Check {
  Json items = Json::array();
  bool all = true;
  void add(const std::string& name, bool ok, double value, double threshold, const std::string& note = {}) {
    Json j{{"name", name}, {"passed", ok}, {"value", value}, {"threshold", threshold}};
    if (!note.empty()) j["note"] = note;
    items.push_back(j);
    all = all && ok;
  }
};

// Order between consecutive ladder entries; values at the rounding floor count
// as converged.
Json order_json(const std::vector<int>& ladder, const std::vector<double>& errs, double floor, double min_order,
                bool& ok, double& worst) {
  Json orders = Json::array();
  ok = true;
  worst = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < errs.size(); ++k) {
    const double ratio = static_cast<double>(ladder[k] - 1) / (ladder[k - 1] - 1);
    const bool at_floor = errs[k - 1] <= floor;
    const double q = observed_order(errs[k - 1], errs[k], ratio);
    orders.push_back(at_floor ? Json("at_roundoff") : Json(q));
    if (!at_floor) {
      worst = std::min(worst, q);
      ok = ok && q >= min_order;
    }
  }
  return orders;
}

int cmd_verify(Pipeline& p, const Faults& faults) {
  const fs::path dir = out_dir(p.cfg);
  fs::create_directories(dir);
  Check c;
  const auto& z = p.problem.zeta;
  c.add("zeta.gate_nesting", (!z.gate_right || z.gate_left) && (!z.gate_left || z.gate_interp), z.zeta, 0.0);
  Json refinement = Json::object();
  if (p.run_interp()) {
    const auto& S = *p.solver;
    const auto& R = *p.surface;
    const auto& L = R.lambda;
    const double tb = S.t_bar();
    c.add("lambda.endpoints_exact", L.values.front() == 0.0 && L.values.back() == tb,
          std::abs(L.values.front()) + std::abs(L.values.back() - tb), 0.0);
    c.add("lambda.residual", L.residual_max <= 1e-11, L.residual_max, 1e-11);
    c.add("lambda.slope_certificate", L.certified, L.certificate_violation, 0.0,
          fmt::format("interior slopes [{:.6f}, {:.6f}] vs window [{:.6f}, {:.6f}] +- {:.3g}", L.lip_lo, L.lip_hi,
                      L.bound_lo, L.bound_hi, L.eps_grid));
    {
      std::mt19937_64 rng(p.cfg.seed);
      int worst = 1;
      for (int k = 0; k < 32; ++k) {
        const double s = tb * (0.02 + 0.96 * static_cast<double>(rng() >> 11) * 0x1.0p-53);
        int changes = 0;
        double prev = S.q(s, 0.0);
        const int steps = static_cast<int>(std::ceil(tb / 1e-3));
        for (int j = 1; j <= steps; ++j) {
          const double q = S.q(s, std::min(tb, j * 1e-3));
          if ((prev < 0.0 && q >= 0.0) || (prev > 0.0 && q <= 0.0)) ++changes;
          if (q != 0.0) prev = q;
        }
        worst = std::max(worst, changes);
      }
      c.add("lambda.uniqueness_scan", worst == 1, worst, 1.0, "sign changes of Q(s, .) on a 1e-3 grid");
    }
    c.add("surface.horizontality", R.horizontality_max <= 1e-10, R.horizontality_max, 1e-10);
    c.add("surface.boundary_lifts", R.boundary_lift_deviation <= 1e-12, R.boundary_lift_deviation, 1e-12);
  }
  if (p.run_left()) {
    const auto& inv = *p.inv;
    const auto& u = *p.u;
    c.add("left.boundary_residual", u.boundary_residual <= 1e-9, u.boundary_residual, 1e-9);
    std::vector<double> ys;
    for (std::size_t i = 0; i < u.rows.size(); i += std::max<std::size_t>(1, u.rows.size() / 16)) ys.push_back(u.rows[i].y);
    const auto ts = tau_slopes(inv, ys, 257);
    const double eps_grid = 2.0 * p.solver->tol() * 256 / p.solver->t_bar();
    c.add("left.tau_slope", ts.min_left_slope >= ts.left_bound - eps_grid, ts.min_left_slope, ts.left_bound);
    const auto inj = injectivity_witness(inv, 65, 17);
    c.add("left.injectivity_witness", inj.max_parameter_deviation <= 1e-9, inj.max_parameter_deviation, 1e-9);
    const auto beta = beta_monotonicity(u);
    c.add("left.beta_increasing", beta.min_slope > 0.0, beta.min_slope, 0.0);
    const auto B = burgers_fd(u);
    const double ad = h_area_domain(u, B);
    const double lr = row_lebesgue(u);
    c.add("area.at_least_lebesgue", ad >= lr * (1.0 - 1e-14), ad - lr, 0.0);
    if (p.run_right()) {
      c.add("right.tau_slope", ts.min_right_slope >= ts.right_bound - eps_grid, ts.min_right_slope, ts.right_bound);
      const auto rt = round_trip_deviation(inv, u);
      c.add("right.round_trip", rt.max_deviation <= 1e-9, rt.max_deviation, 1e-9);
      c.add("right.boundary_residual", p.ur->boundary_residual <= 1e-9, p.ur->boundary_residual, 1e-9);

      const CalibrationEvaluator ev(inv, faults.mu_bar_offset);
      const auto field = build_field(ev, *p.table, p.cfg.n_t);
      c.add("calibration.unit_norm", field.unit_norm_max <= 1e-12, field.unit_norm_max, 1e-12);
      const auto na = normal_agreement(ev, u);
      c.add("calibration.normal_agreement", na.max_component_gap <= 1e-8, na.max_component_gap, 1e-8);
      {
        const Rect rc = inscribed_rectangle(*p.table);
        std::mt19937_64 rng(p.cfg.seed + 1);
        auto draw = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
        double worst = 0.0;
        for (int k = 0; k < 64; ++k) {
          const double eta = rc.eta_lo + (rc.eta_hi - rc.eta_lo) * draw();
          const double tau = rc.tau_lo + (rc.tau_hi - rc.tau_lo) * draw();
          const double x = 2.0 * draw() - 1.0, s = 2.0 * draw() - 1.0;
          const HPoint q{x, eta, tau - 2.0 * x * eta};
          const auto a = ev.ambient(q), b = ev.ambient(flow_xr(q, s));
          worst = std::max({worst, std::abs(a.lambda_bar - b.lambda_bar), std::abs(a.mu_bar - b.mu_bar)});
        }
        c.add("calibration.fiber_constancy", worst <= 1e-12, worst, 1e-12);
      }

      // Refinement study on the configured ladder; the divergence rectangle is
      // fixed by the coarsest grid so that every level sees the same region.
      const auto& ladder = p.cfg.refine;
      std::vector<double> gaps, spreads, formula, divs;
      std::optional<Rect> rect;
      for (int n : ladder) {
        const auto un = left_graph(inv, {n, n});
        const auto Bn = burgers_fd(un);
        const auto Rn = build_ruled_surface(*p.solver, n, n);
        gaps.push_back(std::abs(h_area_domain(un, Bn) - h_area_surface(*p.solver, Rn, p.cfg.gauss).value));
        const auto sp = ruling_spread(*p.solver, un, Bn, n);
        spreads.push_back(sp.max_spread);
        formula.push_back(sp.max_formula_gap);
        if (!rect) rect = inscribed_rectangle(right_domain(inv, un));
        divs.push_back(divergence_residual(build_field(ev, *rect, n, n)).max_interior);
      }
      auto add_order = [&](const std::string& name, const std::vector<double>& errs, double floor) {
        bool ok = false;
        double worst = 0.0;
        const auto orders = order_json(ladder, errs, floor, 0.9, ok, worst);
        refinement[name] = {{"grids", ladder}, {"values", errs}, {"orders", orders}};
        c.add(name + "_order", ok, std::isfinite(worst) ? worst : 99.0, 0.9);
      };
      add_order("area.route_gap", gaps, 1e-13);
      add_order("burgers.ruling_spread", spreads, 1e-13);
      add_order("burgers.formula_gap", formula, 1e-13);
      add_order("calibration.divergence", divs, 1e-13);
    }
  }
  Json report{{"passed", c.all && !p.gate_blocked}, {"checks", c.items}, {"refinement", refinement},
              {"stages", p.stages}};
  if (faults.mu_bar_offset != 0.0) report["faults"] = {{"mu_bar_offset", faults.mu_bar_offset}};
  write_json(out_dir(p.cfg) / "verify.json", report);
  for (const auto& it : c.items)
    fmt::print("{:<4} {:<36} value {:.6g}\n", it["passed"].get<bool>() ? "ok" : "FAIL", it["name"].get<std::string>(),
               it["value"].get<double>());
  if (!c.all) return kExitVerify;
  return p.gate_blocked ? kExitGate : kExitOk;
}

BumpSpec default_stationarity_bump(const Pipeline& p) {
  if (p.cfg.stationarity_bump) return *p.cfg.stationarity_bump;
  const auto& D = p.problem.domain;
  return {0.0, 0.5 * D.t_bar(), 0.4 * std::min(-D.y_min(), D.y_max()), 0.15 * D.t_bar(), 1.0};
}

int cmd_compete(Pipeline& p) {
  const fs::path dir = out_dir(p.cfg);
  fs::create_directories(dir);
  if (!p.run_interp() || !p.run_left()) {
    write_json(dir / "compete.json", Json{{"stages", p.stages}});
    return kExitGate;
  }
  const auto& u = *p.u;
  const auto& D = p.problem.domain;
  const auto bumps = random_bumps(D, u, p.cfg.seed, p.cfg.bumps);
  const auto reps = run_competitors(u, D, bumps, p.cfg.eps);
  const double area_u = h_area_domain(u);
  const double tol_area = 1e-9 * (1.0 + area_u);
  Json arr = Json::array();
  bool ok = true;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& r : reps) {
    arr.push_back({{"bump", bump_json(r.bump)},
                   {"epsilon", r.epsilon},
                   {"admissible", r.admissible},
                   {"min_beta_slope", r.min_beta_slope},
                   {"area_u", r.area_u},
                   {"area_v", r.area_v},
                   {"margin", r.margin},
                   {"sup_diff", r.sup_diff}});
    if (r.admissible) {
      worst = std::min(worst, r.margin);
      ok = ok && r.margin >= -tol_area;
    }
  }
  const auto b = default_stationarity_bump(p);
  const auto st = stationarity_slope(u, D, b, p.cfg.ladder);
  Json rungs = Json::array();
  for (const auto& r : st.rungs) rungs.push_back({{"epsilon", r.epsilon}, {"admissible", r.admissible}, {"slope", r.slope}});
  write_json(dir / "compete.json",
             Json{{"seed", p.cfg.seed},
                  {"tol_area", tol_area},
                  {"area_u", area_u},
                  {"min_margin", worst},
                  {"competitors", arr},
                  {"stationarity",
                   {{"bump", bump_json(b)},
                    {"rungs", rungs},
                    {"richardson", st.richardson},
                    {"extrapolated", st.extrapolated},
                    {"warnings", st.warnings}}}});
  fmt::print("{} competitors, min margin {:.6g} (tolerance {:.3g}); stationarity slope {:.3g}\n", reps.size(), worst,
             -tol_area, st.extrapolated);
  return ok ? kExitOk : kExitVerify;
}

int cmd_probe(Pipeline& p) {
  const fs::path dir = out_dir(p.cfg);
  fs::create_directories(dir);
  if (!p.run_interp() || !p.run_left()) {
    write_json(dir / "probe.json", Json{{"stages", p.stages}});
    return kExitGate;
  }
  const double tb = p.problem.domain.t_bar();
  const WPoint w0{p.cfg.probe_y0, p.cfg.probe_t0.value_or(0.5 * tb)};
  const double r = p.cfg.probe_r.value_or(0.25 * tb);
  const auto pr = regularity_probe(*p.u, w0, r, p.cfg.probe_rho, ProbeOptions{1025, 6, p.cfg.lip_safety});
  Json arr = Json::array();
  bool dev_ok = true, decreasing = true;
  for (std::size_t k = 0; k < pr.rungs.size(); ++k) {
    const auto& q = pr.rungs[k];
    arr.push_back({{"rho", q.rho},
                   {"ell", q.ell},
                   {"rho_ell", q.rho_ell},
                   {"v_sup", q.v_sup},
                   {"zeta_bound", q.zeta_bound},
                   {"zeta_local", q.zeta_local},
                   {"gate_passed", q.gate_passed},
                   {"resolved", q.resolved},
                   {"max_deviation", q.max_deviation},
                   {"nodes_compared", q.nodes_compared},
                   {"note", q.note}});
    if (q.resolved) dev_ok = dev_ok && q.max_deviation <= 1e-6;
    if (k > 0 && q.rho < pr.rungs[k - 1].rho) decreasing = decreasing && q.rho_ell < pr.rungs[k - 1].rho_ell;
  }
  write_json(dir / "probe.json", Json{{"w0", {w0.y, w0.t}},
                                      {"r", r},
                                      {"rungs", arr},
                                      {"trend_slope", pr.trend_slope},
                                      {"rho_ell_decreasing", decreasing}});
  fmt::print("probe at ({}, {}), r = {}: {} rung(s) resolved, trend slope {:.3f}\n", w0.y, w0.t, r,
             std::count_if(pr.rungs.begin(), pr.rungs.end(), [](const auto& q) { return q.resolved; }),
             pr.trend_slope);
  if (!pr.any_resolved) return kExitGate;
  return dev_ok && decreasing ? kExitOk : kExitVerify;
}

int cmd_export(Pipeline& p, const Faults& faults) {
  const fs::path dir = out_dir(p.cfg);
  fs::create_directories(dir);
  if (p.run_interp()) {
    export_mesh(*p.surface, dir / "surface.obj", dir / "surface_burgers.csv");
    if (p.run_left()) {
      write_graph_csv(dir / "u.csv", *p.u);
      if (p.run_right()) {
        write_graph_csv(dir / "u_right.csv", *p.ur);
        const CalibrationEvaluator ev(*p.inv, faults.mu_bar_offset);
        const Rect rc = inscribed_rectangle(*p.table);
        const auto f = build_field(ev, rc, p.cfg.n_y, p.cfg.n_t);
        const auto div = divergence_residual(f);
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < f.eta.size(); ++i)
          for (std::size_t k = 0; k < f.tau[i].size(); ++k)
            rows.push_back({f.eta[i], f.tau[i][k], f.lambda_bar[i][k], f.mu_bar[i][k], div.residual[i][k]});
        write_csv(dir / "field.csv", {"eta", "tau", "lambda_bar", "mu_bar", "div_residual"}, rows);
      }
    }
  }
  write_json(dir / "zeta.json", zeta_json(p));
  return p.gate_blocked ? kExitGate : kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run_cli(args);
}

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Horizontally ruled minimal surfaces over lenticular domains in the Heisenberg group", "plateau"};
  Options o;
  app.require_subcommand(1, 1);
  for (const char* name : {"solve", "verify", "compete", "probe", "export"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", o.config, "case configuration file")->required();
    sub->add_option("--grid", o.grid, "set n_s = n_y = n_t = N")->check(CLI::Range(16, 1 << 16));
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--seed", o.seed, "64-bit seed for randomized checks");
    sub->add_option("--workers", o.workers, "worker threads (0 = all cores)");
    sub->add_option("--fault", o.faults, "fault injection K=V (mu_bar_offset)");
    sub->callback([&o, name] { o.command = name; });
  }
  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitError;
  }

  try {
    const Faults faults = parse_faults(o.faults);
    Pipeline p;
    p.cfg = load_config(o.config);
    if (o.grid) p.cfg.set_grid(*o.grid);
    if (o.out) p.cfg.out = *o.out;
    if (o.seed) p.cfg.seed = *o.seed;
    if (o.workers) p.cfg.workers = *o.workers;
    set_worker_count(p.cfg.workers);
    p.problem = p.cfg.problem();
    if (o.command == "solve") return cmd_solve(p);
    if (o.command == "verify") return cmd_verify(p, faults);
    if (o.command == "compete") return cmd_compete(p);
    if (o.command == "probe") return cmd_probe(p);
    if (o.command == "export") return cmd_export(p, faults);
    return kExitError;
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error:\n{}\n", e.what());
  } catch (const ValidationError& e) {
    fmt::print(stderr, "invalid problem: {}\n", e.what());
    for (const auto& f : e.failures()) fmt::print(stderr, "  - {}\n", f);
  } catch (const GateError& e) {
    fmt::print(stderr, "gate '{}': {}\n", e.gate(), e.what());
    return kExitGate;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
  }
  return kExitError;
}

}  // namespace plateau
