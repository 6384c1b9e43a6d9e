#include "plateau/minimality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <unordered_map>

#include <fmt/format.h>

#include "plateau/errors.hpp"
#include "plateau/numeric.hpp"

namespace plateau {

double bump_value(const BumpSpec& b, double y, double t) {
  const double dy = (y - b.y0) / b.ry, dt = (t - b.t0) / b.rt;
  const double q = 1.0 - dy * dy - dt * dt;
  return q > 0.0 ? b.amplitude * q * q : 0.0;
}

double bump_dt_bound(const BumpSpec& b) { return 8.0 * std::abs(b.amplitude) / (3.0 * std::sqrt(3.0) * b.rt); }

namespace {

std::pair<double, double> grid_cells(const GraphFunction& u) {
  double dy = 0.0, dt = 0.0;
  for (std::size_t i = 0; i < u.rows.size(); ++i) {
    if (i > 0) dy = std::max(dy, u.rows[i].y - u.rows[i - 1].y);
    const auto& t = u.rows[i].t;
    if (t.size() > 1) dt = std::max(dt, (t.back() - t.front()) / static_cast<double>(t.size() - 1));
  }
  return {dy, dt};
}

}  // namespace

bool bump_support_inside(const BumpSpec& b, const LenticularDomain& D, const GraphFunction& u) {
  if (!(b.ry > 0.0 && b.rt > 0.0)) return false;
  const auto [my, mt] = grid_cells(u);
  const double ey = b.ry + my, et = b.rt + mt;
  constexpr int kAngles = 720;
  for (int k = 0; k < kAngles; ++k) {
    const double a = 2.0 * M_PI * k / kAngles;
    const WPoint w{b.y0 + ey * std::cos(a), b.t0 + et * std::sin(a)};
    if (w.t <= 0.0 || w.t >= D.t_bar()) return false;
    if (!(D.gamma1()(w.t) < w.y && w.y < D.gamma2()(w.t))) return false;
  }
  return true;
}

GraphFunction make_competitor(const GraphFunction& u, const LenticularDomain& D, const BumpSpec& b, double eps) {
  if (!bump_support_inside(b, D, u))
    throw PreconditionError(fmt::format("bump at ({:.6g}, {:.6g}) with radii ({:.6g}, {:.6g}) reaches the boundary",
                                        b.y0, b.t0, b.ry, b.rt));
  GraphFunction v = u;
  v.lip_estimate = 0.0;
  for (auto& r : v.rows) {
    r.s.clear();
    r.h.clear();
    for (std::size_t k = 0; k < r.t.size(); ++k) r.u[k] += eps * bump_value(b, r.y, r.t[k]);
  }
  return v;
}

Admissibility check_admissible(const GraphFunction& v) {
  const auto beta = beta_monotonicity(v);
  return {beta.min_slope > 0.0, beta.min_slope};
}

CompetitorReport compare_areas(const GraphFunction& u, double area_u, const GraphFunction& v) {
  CompetitorReport rep;
  const auto adm = check_admissible(v);
  rep.admissible = adm.admissible;
  rep.min_beta_slope = adm.min_slope;
  rep.area_u = area_u;
  rep.area_v = h_area_domain(v);
  rep.margin = rep.area_v - rep.area_u;
  for (std::size_t i = 0; i < u.rows.size(); ++i)
    for (std::size_t k = 0; k < u.rows[i].u.size(); ++k)
      rep.sup_diff = std::max(rep.sup_diff, std::abs(v.rows[i].u[k] - u.rows[i].u[k]));
  return rep;
}

namespace {

double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

std::vector<BumpSpec> random_bumps(const LenticularDomain& D, const GraphFunction& u, std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::vector<BumpSpec> out;
  const double tb = D.t_bar();
  const double ymin = D.y_min(), ymax = D.y_max();
  const int max_tries = 1000 * std::max(count, 1);
  for (int tries = 0; static_cast<int>(out.size()) < count && tries < max_tries; ++tries) {
    BumpSpec b;
    b.t0 = tb * (0.1 + 0.8 * unit_draw(rng));
    b.y0 = ymin + (ymax - ymin) * (0.15 + 0.7 * unit_draw(rng));
    b.ry = (ymax - ymin) * (0.04 + 0.16 * unit_draw(rng));
    b.rt = tb * (0.04 + 0.16 * unit_draw(rng));
    b.amplitude = 0.5 + unit_draw(rng);
    if (bump_support_inside(b, D, u)) out.push_back(b);
  }
  if (static_cast<int>(out.size()) < count)
    throw PreconditionError(fmt::format("could only place {} of {} bumps inside the domain", out.size(), count));
  return out;
}

std::vector<CompetitorReport> run_competitors(const GraphFunction& u, const LenticularDomain& D,
                                              const std::vector<BumpSpec>& bumps, const std::vector<double>& eps_list) {
  const double area_u = h_area_domain(u);
  std::vector<CompetitorReport> out(bumps.size() * eps_list.size());
  parallel_for(out.size(), [&](std::size_t n) {
    const auto& b = bumps[n / eps_list.size()];
    const double eps = eps_list[n % eps_list.size()];
    auto rep = compare_areas(u, area_u, make_competitor(u, D, b, eps));
    rep.bump = b;
    rep.epsilon = eps;
    out[n] = rep;
  });
  return out;
}

StationarityReport stationarity_slope(const GraphFunction& u, const LenticularDomain& D, const BumpSpec& b,
                                      const std::vector<double>& eps_ladder) {
  StationarityReport rep;
  rep.rungs.resize(eps_ladder.size());
  parallel_for(eps_ladder.size(), [&](std::size_t n) {
    const double eps = eps_ladder[n];
    const auto vp = make_competitor(u, D, b, eps);
    const auto vm = make_competitor(u, D, b, -eps);
    StationarityRung r;
    r.epsilon = eps;
    r.admissible = check_admissible(vp).admissible && check_admissible(vm).admissible;
    r.slope = (h_area_domain(vp) - h_area_domain(vm)) / (2.0 * eps);
    rep.rungs[n] = r;
  });
  std::vector<StationarityRung> kept;
  for (const auto& r : rep.rungs) {
    if (r.admissible)
      kept.push_back(r);
    else
      rep.warnings.push_back(fmt::format("rung eps = {:.6g} dropped: competitor not admissible", r.epsilon));
  }
  if (kept.empty()) {
    rep.warnings.push_back("no admissible rung");
    rep.extrapolated = std::numeric_limits<double>::quiet_NaN();
    return rep;
  }
  // The central difference has an even expansion in ε: d(ε) = d0 + c·ε² + O(ε⁴).
  for (std::size_t k = 1; k < kept.size(); ++k) {
    const double q2 = std::pow(kept[k - 1].epsilon / kept[k].epsilon, 2);
    rep.richardson.push_back((q2 * kept[k].slope - kept[k - 1].slope) / (q2 - 1.0));
  }
  rep.extrapolated = rep.richardson.empty() ? kept.back().slope : rep.richardson.back();
  return rep;
}

namespace {

struct NodeRef {
  double y, t, v;
};

// Max |v(a) − v(b)| / |a − b| over node pairs closer than `radius`.
double local_pair_lipschitz(const std::vector<NodeRef>& nodes, double radius) {
  if (nodes.size() < 2 || !(radius > 0.0)) return 0.0;
  auto key = [&](double y, double t) {
    const auto iy = static_cast<std::int64_t>(std::floor(y / radius));
    const auto it = static_cast<std::int64_t>(std::floor(t / radius));
    return (iy << 32) ^ (it & 0xffffffff);
  };
  std::unordered_map<std::int64_t, std::vector<std::size_t>> buckets;
  for (std::size_t n = 0; n < nodes.size(); ++n) buckets[key(nodes[n].y, nodes[n].t)].push_back(n);
  std::vector<double> best(nodes.size(), 0.0);
  parallel_for(nodes.size(), [&](std::size_t n) {
    const auto& a = nodes[n];
    const auto iy = static_cast<std::int64_t>(std::floor(a.y / radius));
    const auto it = static_cast<std::int64_t>(std::floor(a.t / radius));
    double m = 0.0;
    for (std::int64_t dy = -1; dy <= 1; ++dy)
      for (std::int64_t dt = -1; dt <= 1; ++dt) {
        const auto f = buckets.find(((iy + dy) << 32) ^ ((it + dt) & 0xffffffff));
        if (f == buckets.end()) continue;
        for (std::size_t j : f->second) {
          if (j <= n) continue;
          const auto& b = nodes[j];
          const double d = std::hypot(a.y - b.y, a.t - b.t);
          if (d > 0.0 && d <= radius) m = std::max(m, std::abs(a.v - b.v) / d);
        }
      }
    best[n] = m;
  });
  return *std::max_element(best.begin(), best.end());
}

}  // namespace

RegularityProbe regularity_probe(const GraphFunction& v, const WPoint& w0, double r,
                                 const std::vector<double>& rho_ladder, const ProbeOptions& opts) {
  if (!(r > 0.0)) throw PreconditionError("probe radius must be positive");
  const auto values = v.values();
  const auto [cy, ct] = grid_cells(v);
  const double pair_radius = opts.pair_radius_cells * std::max(cy, ct);

  std::vector<NodeRef> ball;
  double v_sup = 0.0;
  for (std::size_t i = 0; i < v.rows.size(); ++i)
    for (std::size_t k = 0; k < v.rows[i].t.size(); ++k) {
      const double y = v.rows[i].y, t = v.rows[i].t[k];
      if (std::hypot(y - w0.y, t - w0.t) < r) {
        ball.push_back({y, t, values[i][k]});
        v_sup = std::max(v_sup, std::abs(values[i][k]));
      }
    }
  if (ball.empty()) throw PreconditionError("probe ball contains no grid nodes of v");

  RegularityProbe out;
  out.rungs.resize(rho_ladder.size());
  for (std::size_t n = 0; n < rho_ladder.size(); ++n) {
    const double rho = rho_ladder[n];
    auto& rep = out.rungs[n];
    rep.w0 = w0;
    rep.r = r;
    rep.rho = rho;
    rep.v_sup = v_sup;
    if (!(rho > 0.0 && rho < r)) {
      rep.note = "rho must lie in (0, r)";
      continue;
    }
    const double tb = 2.0 * r;
    auto gamma = [&](double s) { return rho / (r * r) * s * (2.0 * r - s); };
    auto in_lens = [&](double y, double t) {
      const double s = t - (w0.t - r);
      return s > 0.0 && s < tb && std::abs(y - w0.y) < gamma(s);
    };
    std::vector<NodeRef> upper, lower;
    for (const auto& a : ball) {
      if (in_lens(a.y, a.t)) continue;
      if (a.y > w0.y) upper.push_back(a);
      if (a.y < w0.y) lower.push_back(a);
    }
    rep.ell = std::max(local_pair_lipschitz(upper, pair_radius), local_pair_lipschitz(lower, pair_radius)) *
              opts.lip_safety;
    rep.rho_ell = rho * rep.ell;
    rep.zeta_bound = 8.0 / r * (1.0 + 2.0 * r) * (rho * v_sup + (1.0 + 2.0 * rho / r) * rho * rep.ell);

    // Local problem in coordinates centred on the lens: a translation of the
    // (y, t) plane is a left translation of the group, so graphs, rulings and
    // areas carry over unchanged.
    const int ns = std::max(opts.boundary_samples, 3);
    std::vector<double> ss(ns), f1(ns), f2(ns);
    bool sampled = true;
    for (int k = 0; k < ns && sampled; ++k) {
      ss[k] = k == ns - 1 ? tb : tb * k / (ns - 1);
      const double t = w0.t - r + ss[k];
      const double g = gamma(ss[k]);
      const auto lo = interpolate_field(v, values, w0.y - g, t);
      const auto hi = interpolate_field(v, values, w0.y + g, t);
      if (!lo || !hi) sampled = false;
      else {
        f1[k] = *lo;
        f2[k] = *hi;
      }
    }
    if (!sampled) {
      rep.note = "lens boundary leaves the sampled domain of v";
      continue;
    }
    // Both arcs start and end at the same two points.
    f2.front() = f1.front();
    f2.back() = f1.back();
    const double c = rho / (r * r);
    auto G2 = ScalarFn1D::polynomial({0.0, 2.0 * r * c, -c}, tb);
    PlateauProblem local;
    try {
      local = make_problem(G2.scaled(-1.0), G2, ScalarFn1D::piecewise_linear(ss, f1, tb),
                           ScalarFn1D::piecewise_linear(ss, f2, tb));
    } catch (const ValidationError& e) {
      rep.note = fmt::format("local problem invalid: {}", e.what());
      continue;
    }
    rep.zeta_local = local.zeta.zeta;
    rep.gate_passed = rep.zeta_bound < threshold_right() && local.zeta.gate_right;
    if (!rep.gate_passed) {
      rep.note = rep.zeta_bound >= threshold_right() ? "zeta bound above the right-graph threshold"
                                                     : "local zeta above the right-graph threshold";
      continue;
    }
    const GraphInverter inv{RulingSolver(local)};
    std::vector<NodeRef> inside;
    for (const auto& a : ball)
      if (in_lens(a.y, a.t)) inside.push_back(a);
    std::vector<double> dev(inside.size(), 0.0);
    parallel_for(inside.size(), [&](std::size_t k) {
      const auto smp = inv.invert_left(inside[k].y - w0.y, inside[k].t - (w0.t - r));
      dev[k] = std::abs(smp.u - inside[k].v);
    });
    rep.resolved = true;
    rep.nodes_compared = inside.size();
    for (double d : dev) rep.max_deviation = std::max(rep.max_deviation, d);
    out.any_resolved = true;
  }
  std::vector<double> lx, ly;
  for (const auto& rep : out.rungs)
    if (rep.rho_ell > 0.0) {
      lx.push_back(std::log(rep.rho));
      ly.push_back(std::log(rep.rho_ell));
    }
  out.trend_slope = fit_slope(lx, ly);
  return out;
}

}  // namespace plateau
