#include "plateau/area.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>

#include "plateau/errors.hpp"
#include "plateau/numeric.hpp"

namespace plateau {

ScalarField2D burgers_fd(const GraphFunction& u) {
  if (u.rows.size() < 3) throw PreconditionError("Burgers operator needs at least 3 rows");
  for (const auto& r : u.rows)
    if (r.t.size() < 3) throw PreconditionError("Burgers operator needs at least 3 nodes per row");
  const auto v = u.values();
  NodeField sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    sq[i].resize(v[i].size());
    for (std::size_t k = 0; k < v[i].size(); ++k) sq[i][k] = v[i][k] * v[i][k];
  }
  const auto uy = fd_dy(u, v);
  const auto st = fd_dt(u, sq);
  ScalarField2D B(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    B[i].resize(v[i].size());
    for (std::size_t k = 0; k < v[i].size(); ++k) B[i][k] = uy[i][k] - 2.0 * st[i][k];
  }
  return B;
}

double burgers_on_ruling(const RulingSolver& solver, double s) {
  const auto d = solver.direction(s);
  return d.alpha_bar / d.beta_bar;
}

double row_integral(const GraphRow& row, const std::vector<double>& f) {
  const std::size_t n = row.t.size();
  if (n < 2) return 0.0;
  const double dt = (row.t.back() - row.t.front()) / static_cast<double>(n - 1);
  CompensatedSum acc;
  if (n % 2 == 1 && n >= 3) {
    for (std::size_t k = 0; k < n; ++k) {
      const double w = (k == 0 || k == n - 1) ? 1.0 : (k % 2 ? 4.0 : 2.0);
      acc.add(w * f[k]);
    }
    return acc.value() * dt / 3.0;
  }
  for (std::size_t k = 0; k < n; ++k) acc.add(((k == 0 || k == n - 1) ? 0.5 : 1.0) * f[k]);
  return acc.value() * dt;
}

double h_area_domain(const GraphFunction& u, const ScalarField2D& B) {
  std::vector<double> per_row(u.rows.size(), 0.0);
  parallel_for(u.rows.size(), [&](std::size_t i) {
    std::vector<double> f(B[i].size());
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = std::sqrt(1.0 + B[i][k] * B[i][k]);
    per_row[i] = u.rows[i].weight * row_integral(u.rows[i], f);
  });
  CompensatedSum total;
  for (double v : per_row) total.add(v);
  return total.value();
}

double h_area_domain(const GraphFunction& u) { return h_area_domain(u, burgers_fd(u)); }

namespace {

struct GaussRule {
  std::vector<double> x;  // on [0, 1]
  std::vector<double> w;
};

GaussRule gauss_rule(int n) {
  switch (n) {
    case 1:
      return {{0.5}, {1.0}};
    case 2: {
      const double a = 0.5 / std::sqrt(3.0);
      return {{0.5 - a, 0.5 + a}, {0.5, 0.5}};
    }
    case 3: {
      const double a = 0.5 * std::sqrt(0.6);
      return {{0.5 - a, 0.5, 0.5 + a}, {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0}};
    }
    default:
      throw PreconditionError(fmt::format("unsupported Gauss order {} (use 1, 2 or 3)", n));
  }
}

HVector cross(const HVector& u, const HVector& v) {
  return {u.b * v.c - u.c * v.b, u.c * v.a - u.a * v.c, u.a * v.b - u.b * v.a};
}

double dot(const HVector& u, const HVector& v) { return u.a * v.a + u.b * v.b + u.c * v.c; }

}  // namespace

SurfaceArea h_area_surface(const RulingSolver& solver, const RuledSurface& R, int gauss) {
  const auto rule = gauss_rule(gauss);
  const auto& s = R.lambda.grid;
  const auto& hh = R.h;
  const std::size_t ns = s.size(), nh = hh.size();
  if (ns < 2 || nh < 2) throw PreconditionError("surface mesh needs at least 2x2 nodes");
  std::vector<double> row_sum(ns - 1, 0.0), row_skip(ns - 1, 0.0);
  std::vector<std::size_t> row_skipped(ns - 1, 0);
  parallel_for(ns - 1, [&](std::size_t i) {
    const double s0 = s[i], ds = s[i + 1] - s[i];
    CompensatedSum acc;
    std::vector<double> sg(rule.x.size()), lg(rule.x.size());
    for (std::size_t a = 0; a < rule.x.size(); ++a) {
      sg[a] = s0 + rule.x[a] * ds;
      lg[a] = solver.lambda_at(sg[a]);
    }
    for (std::size_t j = 0; j + 1 < nh; ++j) {
      const double h0 = hh[j], dh = hh[j + 1] - hh[j];
      CompensatedSum cell;
      bool degenerate = true;
      for (std::size_t a = 0; a < rule.x.size(); ++a)
        for (std::size_t b = 0; b < rule.x.size(); ++b) {
          const double h = h0 + rule.x[b] * dh;
          const auto tg = solver.tangents(h, sg[a], lg[a]);
          const HVector N = cross(tg.d_h, tg.d_s);
          if (dot(N, N) > 0.0) degenerate = false;
          const HPoint p = solver.rho_at(h, sg[a], lg[a]);
          const double nx = dot(N, frame_x(p)), ny = dot(N, frame_y(p));
          cell.add(rule.w[a] * rule.w[b] * std::hypot(nx, ny));
        }
      if (degenerate) {
        // Zero Euclidean area; bound what was left out by the frame scale times the cell size.
        ++row_skipped[i];
        row_skip[i] += ds * dh;
        continue;
      }
      acc.add(cell.value() * ds * dh);
    }
    row_sum[i] = acc.value();
  });
  SurfaceArea out;
  CompensatedSum total;
  for (std::size_t i = 0; i + 1 < ns; ++i) {
    total.add(row_sum[i]);
    out.skipped_cells += row_skipped[i];
    out.skipped_bound += row_skip[i];
  }
  out.value = total.value();
  out.cells = (ns - 1) * (nh - 1);
  return out;
}

double lebesgue_area(const LenticularDomain& D) {
  const auto& g1 = D.gamma1();
  const auto& g2 = D.gamma2();
  const double tb = D.t_bar();
  const bool poly = g1.kind() == ScalarFn1D::Kind::Polynomial && g2.kind() == ScalarFn1D::Kind::Polynomial;
  if (poly) {
    constexpr int n = 4096;
    const double h = tb / n;
    CompensatedSum acc;
    for (int k = 0; k <= n; ++k) {
      const double t = k == n ? tb : k * h;
      const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
      acc.add(w * (g2(t) - g1(t)));
    }
    return acc.value() * h / 3.0;
  }
  // Piecewise-linear (or mixed): exact trapezoid over the merged breakpoints,
  // refined uniformly so that a polynomial partner is integrated to O(h²).
  std::vector<double> ts;
  for (const auto* f : {&g1, &g2})
    if (f->kind() == ScalarFn1D::Kind::PiecewiseLinear) ts.insert(ts.end(), f->sample_t().begin(), f->sample_t().end());
  if (!poly && (g1.kind() == ScalarFn1D::Kind::Polynomial || g2.kind() == ScalarFn1D::Kind::Polynomial))
    for (int k = 0; k <= 8192; ++k) ts.push_back(tb * k / 8192.0);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  CompensatedSum acc;
  for (std::size_t k = 1; k < ts.size(); ++k) {
    const double a = g2(ts[k - 1]) - g1(ts[k - 1]);
    const double b = g2(ts[k]) - g1(ts[k]);
    acc.add(0.5 * (a + b) * (ts[k] - ts[k - 1]));
  }
  return acc.value();
}

RulingSpread ruling_spread(const RulingSolver& solver, const GraphFunction& u, const ScalarField2D& B, int n_s) {
  static constexpr std::array<double, 5> kH{1.0 / 6, 2.0 / 6, 3.0 / 6, 4.0 / 6, 5.0 / 6};
  const double tb = solver.t_bar();
  struct Row {
    double spread = 0.0, gap = 0.0;
    std::size_t used = 0, skipped = 0;
  };
  std::vector<Row> out(static_cast<std::size_t>(std::max(n_s - 2, 0)));
  parallel_for(out.size(), [&](std::size_t n) {
    const double s = tb * static_cast<double>(n + 1) / (n_s - 1);
    const double lam = solver.lambda_at(s);
    const auto d = solver.direction_at(s, lam);
    const double exact = d.alpha_bar / d.beta_bar;
    double lo = 1e300, hi = -1e300;
    Row r;
    for (double h : kH) {
      const WPoint w = project_left(solver.rho_at(h, s, lam));
      const auto b = interpolate_field(u, B, w.y, w.t);
      if (!b) {
        ++r.skipped;
        continue;
      }
      ++r.used;
      lo = std::min(lo, *b);
      hi = std::max(hi, *b);
      r.gap = std::max(r.gap, std::abs(*b - exact));
    }
    if (r.used >= 2) r.spread = hi - lo;
    out[n] = r;
  });
  RulingSpread rep;
  for (const auto& r : out) {
    if (r.used > 0) ++rep.rulings;
    rep.points += r.used;
    rep.skipped_points += r.skipped;
    rep.max_spread = std::max(rep.max_spread, r.spread);
    rep.max_formula_gap = std::max(rep.max_formula_gap, r.gap);
  }
  return rep;
}

}  // namespace plateau
