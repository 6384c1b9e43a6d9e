#include "plateau/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "plateau/errors.hpp"
#include "plateau/numeric.hpp"

namespace plateau {

GraphInverter::GraphInverter(RulingSolver solver) : solver_(std::move(solver)) {}

GraphInverter::Eval GraphInverter::eval(double s, double y) const {
  const auto& D = solver_.domain();
  const auto& p = solver_.datum();
  Eval e;
  e.lam = solver_.lambda_at(s);
  const double g1 = D.gamma1()(s), g2 = D.gamma2()(e.lam);
  const double f1 = p.phi1(s), f2 = p.phi2(e.lam);
  const double width = g2 - g1;
  e.h = width > 0.0 ? (y - g1) / width : 0.0;
  const double E = width * (f2 - f1);
  e.tau = (1.0 - e.h) * s + e.h * e.lam + 2.0 * e.h * (1.0 - e.h) * E;
  e.rho1 = (1.0 - e.h) * f1 + e.h * f2;
  return e;
}

double GraphInverter::h_y(double s, double y) const {
  const double lam = solver_.lambda_at(s);
  const double g1 = solver_.domain().gamma1()(s);
  const double g2 = solver_.domain().gamma2()(lam);
  if (!(g1 < y && y < g2))
    throw PreconditionError(
        fmt::format("s = {:.17g} is not in J_y for y = {:.17g} (gamma1 = {:.6g}, gamma2(lambda) = {:.6g})",
                    s, y, g1, g2));
  return (y - g1) / (g2 - g1);
}

JInterval GraphInverter::interval_J(double y) const {
  const auto sl = solver_.domain().slice(y);
  JInterval J;
  J.y = y;
  J.empty = sl.empty;
  J.at_extremum = sl.at_extremum;
  J.t_lo = sl.t_lo;
  J.t_hi = sl.t_hi;
  if (sl.empty && !sl.at_extremum)
    throw DomainError(fmt::format("y = {:.17g} lies outside the y-range of the domain", y));
  if (y <= 0.0) {
    J.s_lo = sl.t_lo;
    J.s_hi = sl.t_hi;
  } else {
    // Rulings crossing height y > 0 are those with γ2(λ(s)) > y, i.e. λ(s) in
    // the γ2-slice; the ends are the preimages of its endpoints under λ.
    J.s_lo = solver_.lambda_inverse(sl.t_lo);
    J.s_hi = solver_.lambda_inverse(sl.t_hi);
  }
  return J;
}

double GraphInverter::tau(double s, double y) const { return eval(s, y).tau; }

double GraphInverter::tau_right(double s, double y) const {
  const auto e = eval(s, y);
  return e.tau + 4.0 * y * e.rho1;
}

double GraphInverter::boundary_value(const JInterval& J, double t) const {
  const auto& p = solver_.datum();
  if (J.y < 0.0) return p.phi1(t);
  if (J.y > 0.0) return p.phi2(t);
  return t < 0.5 * solver_.t_bar() ? p.phi1(0.0) : p.phi1(solver_.t_bar());
}

std::pair<double, double> GraphInverter::right_interval(const JInterval& J) const {
  return {J.t_lo + 4.0 * J.y * boundary_value(J, J.t_lo), J.t_hi + 4.0 * J.y * boundary_value(J, J.t_hi)};
}

namespace {

InversionSample boundary_sample(const GraphInverter& inv, const JInterval& J, bool low) {
  InversionSample out;
  const double t = low ? J.t_lo : J.t_hi;
  out.s = low ? J.s_lo : J.s_hi;
  out.lambda = inv.solver().lambda_at(out.s);
  out.h = J.y > 0.0 ? 1.0 : 0.0;
  out.u = inv.boundary_value(J, t);
  return out;
}

}  // namespace

InversionSample GraphInverter::invert_left(double y, double t) const { return invert_left(interval_J(y), t); }

InversionSample GraphInverter::invert_left(const JInterval& J, double t) const {
  if (!solver_.problem().zeta.gate_left)
    throw GateError("left", "left graph inversion requires zeta < (sqrt(129)-11)/4");
  const double slack = 1e-12 * std::max(1.0, solver_.t_bar());
  if (J.empty || t < J.t_lo - slack || t > J.t_hi + slack)
    throw DomainError(fmt::format("point ({:.17g}, {:.17g}) is not in the closed domain", J.y, t));
  if (t <= J.t_lo) return boundary_sample(*this, J, true);
  if (t >= J.t_hi) return boundary_sample(*this, J, false);
  const double y = J.y;
  const double s = bracketed_illinois([&](double x) { return eval(x, y).tau - t; }, J.s_lo, J.s_hi,
                                      J.t_lo - t, J.t_hi - t);
  const auto e = eval(s, y);
  InversionSample out{e.h, s, e.lam, e.rho1, std::abs(e.tau - t)};
  if (out.residual > solver_.tol())
    throw ConsistencyError(fmt::format("left inversion at ({:.17g}, {:.17g}) left residual {:.3g}", y, t,
                                       out.residual));
  return out;
}

InversionSample GraphInverter::invert_right(double eta, double tau) const {
  return invert_right(interval_J(eta), tau);
}

InversionSample GraphInverter::invert_right(const JInterval& J, double tau_value) const {
  if (!solver_.problem().zeta.gate_right)
    throw GateError("right", "right graph inversion requires zeta < (sqrt(721)-25)/48");
  const auto [lo, hi] = right_interval(J);
  const double slack = 1e-12 * std::max(1.0, solver_.t_bar());
  if (J.empty || tau_value < lo - slack || tau_value > hi + slack)
    throw DomainError(
        fmt::format("point ({:.17g}, {:.17g}) is not in the right domain", J.y, tau_value));
  if (tau_value <= lo) return boundary_sample(*this, J, true);
  if (tau_value >= hi) return boundary_sample(*this, J, false);
  const double y = J.y;
  auto f = [&](double x) {
    const auto e = eval(x, y);
    return e.tau + 4.0 * y * e.rho1 - tau_value;
  };
  const double s = bracketed_illinois(f, J.s_lo, J.s_hi, lo - tau_value, hi - tau_value);
  const auto e = eval(s, y);
  InversionSample out{e.h, s, e.lam, e.rho1, std::abs(e.tau + 4.0 * y * e.rho1 - tau_value)};
  if (out.residual > solver_.tol())
    throw ConsistencyError(fmt::format("right inversion at ({:.17g}, {:.17g}) left residual {:.3g}", y,
                                       tau_value, out.residual));
  return out;
}

NodeField GraphFunction::values() const {
  NodeField f(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) f[i] = rows[i].u;
  return f;
}

std::size_t GraphFunction::node_count() const {
  std::size_t n = 0;
  for (const auto& r : rows) n += r.t.size();
  return n;
}

RowLayout row_layout(double y_lo, double y_hi, int n_y) {
  if (!(y_lo < 0.0 && y_hi > 0.0)) throw PreconditionError("row layout needs y_lo < 0 < y_hi");
  int M = std::max(2, (n_y + 1) / 2);
  if (M % 2) --M;
  M = std::max(M, 2);
  const double base = 1.0 / (3.0 * M);
  auto simpson = [&](int k) { return (k == 0 || k == M) ? 1.0 : (k % 2 ? 4.0 : 2.0); };
  RowLayout L;
  for (int k = 1; k < M; ++k) {
    const double sg = static_cast<double>(k) / M;
    L.y.push_back(y_lo * (1.0 - sg * sg));
    L.weight.push_back(base * simpson(k) * 2.0 * (-y_lo) * sg);
  }
  L.y.push_back(0.0);
  L.weight.push_back(base * 2.0 * (y_hi - y_lo));
  for (int k = M - 1; k >= 1; --k) {
    const double sg = static_cast<double>(k) / M;
    L.y.push_back(y_hi * (1.0 - sg * sg));
    L.weight.push_back(base * simpson(k) * 2.0 * y_hi * sg);
  }
  return L;
}

namespace {

std::vector<double> uniform_nodes(double a, double b, int n) {
  std::vector<double> t(n);
  for (int k = 0; k < n; ++k) t[k] = k == n - 1 ? b : a + (b - a) * k / (n - 1);
  return t;
}

double row_max_abs_gap(const GraphRow& r, double ref_lo, double ref_hi) {
  return std::max(std::abs(r.u.front() - ref_lo), std::abs(r.u.back() - ref_hi));
}

// Fills rows of `g` (already laid out) by inverting every node.
template <class Invert>
void fill_rows(GraphFunction& g, int n_t, Invert&& invert) {
  const std::size_t nr = g.rows.size();
  const std::size_t nt = static_cast<std::size_t>(n_t);
  std::vector<double> resid(nr * nt, 0.0);
  parallel_for(nr * nt, [&](std::size_t idx) {
    const std::size_t i = idx / nt, k = idx % nt;
    auto& r = g.rows[i];
    const auto smp = invert(i, r.t[k]);
    r.u[k] = smp.u;
    r.s[k] = smp.s;
    r.h[k] = smp.h;
    resid[idx] = smp.residual;
  });
  for (double v : resid) g.max_inversion_residual = std::max(g.max_inversion_residual, v);
}

}  // namespace

GraphFunction left_graph(const GraphInverter& inv, const GridSpec& grid) {
  const auto& P = inv.solver().problem();
  if (!P.zeta.gate_left)
    throw GateError("left", fmt::format("left graph requires zeta < (sqrt(129)-11)/4 = {:.10f}, got {:.17g}",
                                        threshold_left(), P.zeta.zeta));
  if (grid.n_t < 3 || grid.n_y < 3) throw PreconditionError("graph grid needs at least 3 nodes per direction");
  const auto& D = P.domain;
  GraphFunction g;
  g.side = GraphSide::Left;
  g.y_lo = D.y_min();
  g.y_hi = D.y_max();
  const auto L = row_layout(g.y_lo, g.y_hi, grid.n_y);
  std::vector<JInterval> Js(L.y.size());
  parallel_for(L.y.size(), [&](std::size_t i) { Js[i] = inv.interval_J(L.y[i]); });
  g.rows.resize(L.y.size());
  for (std::size_t i = 0; i < L.y.size(); ++i) {
    auto& r = g.rows[i];
    r.y = L.y[i];
    r.weight = L.weight[i];
    r.t_lo = Js[i].t_lo;
    r.t_hi = Js[i].t_hi;
    r.t = uniform_nodes(r.t_lo, r.t_hi, grid.n_t);
    r.u.assign(grid.n_t, 0.0);
    r.s.assign(grid.n_t, 0.0);
    r.h.assign(grid.n_t, 0.0);
  }
  fill_rows(g, grid.n_t, [&](std::size_t i, double t) { return inv.invert_left(Js[i], t); });
  for (std::size_t i = 0; i < g.rows.size(); ++i) {
    const auto& r = g.rows[i];
    g.boundary_residual = std::max(g.boundary_residual, row_max_abs_gap(r, inv.boundary_value(Js[i], r.t_lo),
                                                                        inv.boundary_value(Js[i], r.t_hi)));
  }
  const auto u = g.values();
  const auto uy = fd_dy(g, u);
  const auto ut = fd_dt(g, u);
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t k = 0; k < u[i].size(); ++k) g.lip_estimate = std::max(g.lip_estimate, std::hypot(uy[i][k], ut[i][k]));
  return g;
}

std::function<double(double)> beta_curve(const GraphFunction& v, std::size_t row) {
  const GraphRow& r = v.rows.at(row);
  return [&r](double t) { return t + 4.0 * r.y * interpolate_uniform(r.t, r.u, t); };
}

BetaCheck beta_monotonicity(const GraphFunction& v) {
  BetaCheck out;
  out.min_slope = std::numeric_limits<double>::infinity();
  out.per_row.resize(v.rows.size());
  for (std::size_t i = 0; i < v.rows.size(); ++i) {
    const auto& r = v.rows[i];
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < r.t.size(); ++k) {
      const double dt = r.t[k] - r.t[k - 1];
      if (!(dt > 0.0)) continue;
      m = std::min(m, 1.0 + 4.0 * r.y * (r.u[k] - r.u[k - 1]) / dt);
    }
    out.per_row[i] = m;
    if (m < out.min_slope) {
      out.min_slope = m;
      out.worst_y = r.y;
    }
  }
  return out;
}

bool RightDomainTable::contains(double eta, double tau) const {
  if (y.size() < 2 || eta <= y.front() || eta >= y.back()) return false;
  const auto it = std::upper_bound(y.begin(), y.end(), eta);
  const std::size_t i = static_cast<std::size_t>(it - y.begin()) - 1;
  const double w = (eta - y[i]) / (y[i + 1] - y[i]);
  const double lo = (1.0 - w) * tau_lo[i] + w * tau_lo[i + 1];
  const double hi = (1.0 - w) * tau_hi[i] + w * tau_hi[i + 1];
  const double inset = std::max(cell[i], cell[i + 1]);
  return tau >= lo + inset && tau <= hi - inset;
}

RightDomainTable right_domain(const GraphInverter& inv, const GraphFunction& u) {
  const auto& P = inv.solver().problem();
  if (!P.zeta.gate_right)
    throw GateError("right", fmt::format("right graph requires zeta < (sqrt(721)-25)/48 = {:.10f}, got {:.17g}",
                                         threshold_right(), P.zeta.zeta));
  const auto beta = beta_monotonicity(u);
  if (!(beta.min_slope > 0.0))
    throw GateError("right", fmt::format("t + 4y u(y,t) is not increasing at y = {:.17g} (slope {:.3g})",
                                         beta.worst_y, beta.min_slope));
  RightDomainTable T;
  for (const auto& r : u.rows) {
    // u equals φ at the row ends, so β at the ends only needs the boundary data.
    T.y.push_back(r.y);
    T.weight.push_back(r.weight);
    T.tau_lo.push_back(r.t.front() + 4.0 * r.y * r.u.front());
    T.tau_hi.push_back(r.t.back() + 4.0 * r.y * r.u.back());
    const double n = static_cast<double>(std::max<std::size_t>(r.t.size(), 2) - 1);
    T.cell.push_back((T.tau_hi.back() - T.tau_lo.back()) / n);
  }
  return T;
}

GraphFunction right_graph(const GraphInverter& inv, const RightDomainTable& table, int n_t) {
  const auto& P = inv.solver().problem();
  if (!P.zeta.gate_right)
    throw GateError("right", fmt::format("right graph requires zeta < (sqrt(721)-25)/48 = {:.10f}, got {:.17g}",
                                         threshold_right(), P.zeta.zeta));
  if (n_t < 3) throw PreconditionError("graph grid needs at least 3 nodes per row");
  GraphFunction g;
  g.side = GraphSide::Right;
  g.y_lo = P.domain.y_min();
  g.y_hi = P.domain.y_max();
  std::vector<JInterval> Js(table.y.size());
  parallel_for(table.y.size(), [&](std::size_t i) { Js[i] = inv.interval_J(table.y[i]); });
  g.rows.resize(table.y.size());
  for (std::size_t i = 0; i < table.y.size(); ++i) {
    auto& r = g.rows[i];
    r.y = table.y[i];
    r.weight = i < table.weight.size() ? table.weight[i] : 0.0;
    const auto [lo, hi] = inv.right_interval(Js[i]);
    r.t_lo = lo;
    r.t_hi = hi;
    r.t = uniform_nodes(lo, hi, n_t);
    r.u.assign(n_t, 0.0);
    r.s.assign(n_t, 0.0);
    r.h.assign(n_t, 0.0);
  }
  fill_rows(g, n_t, [&](std::size_t i, double tau) { return inv.invert_right(Js[i], tau); });
  for (std::size_t i = 0; i < g.rows.size(); ++i) {
    const auto& r = g.rows[i];
    g.boundary_residual = std::max(g.boundary_residual, row_max_abs_gap(r, inv.boundary_value(Js[i], Js[i].t_lo),
                                                                        inv.boundary_value(Js[i], Js[i].t_hi)));
  }
  return g;
}

RoundTripReport round_trip_deviation(const GraphInverter& inv, const GraphFunction& u) {
  std::vector<std::pair<std::size_t, std::size_t>> nodes;
  for (std::size_t i = 0; i < u.rows.size(); ++i)
    for (std::size_t k = 1; k + 1 < u.rows[i].t.size(); ++k) nodes.emplace_back(i, k);
  std::vector<double> dev(nodes.size(), 0.0);
  std::vector<JInterval> Js(u.rows.size());
  parallel_for(u.rows.size(), [&](std::size_t i) { Js[i] = inv.interval_J(u.rows[i].y); });
  parallel_for(nodes.size(), [&](std::size_t n) {
    const auto [i, k] = nodes[n];
    const auto& r = u.rows[i];
    const HPoint p = lift_left({r.y, r.t[k]}, r.u[k]);
    const WPoint w = project_right(p);
    const auto smp = inv.invert_right(Js[i], w.t);
    const HPoint q = lift_right(w, smp.u);
    dev[n] = std::max({std::abs(p.x - q.x), std::abs(p.y - q.y), std::abs(p.t - q.t)});
  });
  RoundTripReport rep;
  rep.samples = nodes.size();
  for (double d : dev) rep.max_deviation = std::max(rep.max_deviation, d);
  return rep;
}

InjectivityReport injectivity_witness(const GraphInverter& inv, int n_s, int n_h) {
  const auto& S = inv.solver();
  const double tb = S.t_bar();
  std::vector<std::pair<double, double>> params;
  for (int i = 1; i < n_s - 1; ++i)
    for (int j = 1; j < n_h - 1; ++j)
      params.emplace_back(static_cast<double>(j) / (n_h - 1), tb * i / (n_s - 1));
  std::vector<double> dev(params.size(), 0.0);
  parallel_for(params.size(), [&](std::size_t n) {
    const auto [h, s] = params[n];
    const WPoint w = project_left(S.rho(h, s));
    const auto smp = inv.invert_left(w.y, w.t);
    dev[n] = std::max(std::abs(smp.h - h), std::abs(smp.s - s));
  });
  InjectivityReport rep;
  rep.samples = params.size();
  for (double d : dev) rep.max_parameter_deviation = std::max(rep.max_parameter_deviation, d);
  return rep;
}

TauSlopeReport tau_slopes(const GraphInverter& inv, const std::vector<double>& ys, int n) {
  const double z = inv.solver().zeta();
  TauSlopeReport rep;
  rep.left_bound = (1.0 - z * (2.0 + (1.0 + z) / (1.0 - z))) * (1.0 - z) / (1.0 + z);
  rep.right_bound = rep.left_bound - 5.0 * z * (1.0 + z) / (1.0 - z);
  std::vector<double> lmin(ys.size(), 1e300), rmin(ys.size(), 1e300);
  parallel_for(ys.size(), [&](std::size_t i) {
    const auto J = inv.interval_J(ys[i]);
    if (J.empty) return;
    double prev_l = J.t_lo, prev_s = J.s_lo;
    double prev_r = inv.right_interval(J).first;
    for (int k = 1; k < n; ++k) {
      const double s = k == n - 1 ? J.s_hi : J.s_lo + (J.s_hi - J.s_lo) * k / (n - 1);
      const double tl = k == n - 1 ? J.t_hi : inv.tau(s, ys[i]);
      const double tr = k == n - 1 ? inv.right_interval(J).second : inv.tau_right(s, ys[i]);
      lmin[i] = std::min(lmin[i], (tl - prev_l) / (s - prev_s));
      rmin[i] = std::min(rmin[i], (tr - prev_r) / (s - prev_s));
      prev_l = tl;
      prev_r = tr;
      prev_s = s;
    }
  });
  rep.min_left_slope = *std::min_element(lmin.begin(), lmin.end());
  rep.min_right_slope = *std::min_element(rmin.begin(), rmin.end());
  return rep;
}

NodeField fd_dt(const GraphFunction& g, const NodeField& f) {
  NodeField d(f.size());
  for (std::size_t i = 0; i < g.rows.size(); ++i) {
    const auto& t = g.rows[i].t;
    const auto& v = f[i];
    const std::size_t n = t.size();
    if (n < 3) throw PreconditionError("d/dt needs at least 3 nodes per row");
    d[i].assign(n, 0.0);
    const double dt = (t.back() - t.front()) / static_cast<double>(n - 1);
    if (!(dt > 0.0)) continue;
    for (std::size_t k = 1; k + 1 < n; ++k) d[i][k] = (v[k + 1] - v[k - 1]) / (2.0 * dt);
    d[i][0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dt);
    d[i][n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * dt);
  }
  return d;
}

namespace {

bool covers(const GraphRow& r, double t) {
  const double slack = 1e-12 * std::max(1.0, std::abs(r.t_hi));
  return t >= r.t_lo - slack && t <= r.t_hi + slack;
}

double row_value(const GraphRow& r, const std::vector<double>& f, double t) {
  return interpolate_uniform(r.t, f, t);
}

}  // namespace

NodeField fd_dy(const GraphFunction& g, const NodeField& f) {
  const std::size_t nr = g.rows.size();
  if (nr < 3) throw PreconditionError("d/dy needs at least 3 rows");
  NodeField d(nr);
  for (std::size_t i = 0; i < nr; ++i) {
    const auto& r = g.rows[i];
    d[i].assign(r.t.size(), 0.0);
    for (std::size_t k = 0; k < r.t.size(); ++k) {
      const double t = r.t[k];
      std::size_t a;  // first row of the three-point stencil
      if (i == 0) {
        a = 0;
      } else if (i + 1 == nr) {
        a = nr - 3;
      } else {
        const bool lo_ok = covers(g.rows[i - 1], t), hi_ok = covers(g.rows[i + 1], t);
        if (lo_ok && hi_ok)
          a = i - 1;
        else if (!lo_ok && i + 2 < nr && hi_ok && covers(g.rows[i + 2], t))
          a = i;
        else if (!hi_ok && i >= 2 && lo_ok && covers(g.rows[i - 2], t))
          a = i - 2;
        else
          a = i - 1;
      }
      const double y0 = g.rows[a].y, y1 = g.rows[a + 1].y, y2 = g.rows[a + 2].y;
      const auto w = derivative_weights(y0, y1, y2, r.y);
      auto val = [&](std::size_t j) { return j == i ? f[i][k] : row_value(g.rows[j], f[j], t); };
      d[i][k] = w.w0 * val(a) + w.w1 * val(a + 1) + w.w2 * val(a + 2);
    }
  }
  return d;
}

std::optional<double> interpolate_field(const GraphFunction& g, const NodeField& f, double y, double t) {
  const std::size_t nr = g.rows.size();
  if (nr < 2 || y < g.rows.front().y || y > g.rows.back().y) return std::nullopt;
  auto it = std::upper_bound(g.rows.begin(), g.rows.end(), y, [](double v, const GraphRow& r) { return v < r.y; });
  std::size_t i = static_cast<std::size_t>(it - g.rows.begin());
  i = std::clamp<std::size_t>(i, 1, nr - 1) - 1;  // rows i, i+1 bracket y
  if (g.rows[i].y == y && covers(g.rows[i], t)) return row_value(g.rows[i], f[i], t);
  if (i + 1 < nr && g.rows[i + 1].y == y && covers(g.rows[i + 1], t)) return row_value(g.rows[i + 1], f[i + 1], t);
  if (i >= 1 && i + 2 < nr) {
    bool all = true;
    for (std::size_t j = i - 1; j <= i + 2; ++j) all = all && covers(g.rows[j], t);
    if (all) {
      double acc = 0.0;
      for (std::size_t a = i - 1; a <= i + 2; ++a) {
        double w = 1.0;
        for (std::size_t b = i - 1; b <= i + 2; ++b)
          if (a != b) w *= (y - g.rows[b].y) / (g.rows[a].y - g.rows[b].y);
        acc += w * row_value(g.rows[a], f[a], t);
      }
      return acc;
    }
  }
  if (covers(g.rows[i], t) && covers(g.rows[i + 1], t)) {
    const double w = (y - g.rows[i].y) / (g.rows[i + 1].y - g.rows[i].y);
    return (1.0 - w) * row_value(g.rows[i], f[i], t) + w * row_value(g.rows[i + 1], f[i + 1], t);
  }
  return std::nullopt;
}

}  // namespace plateau
