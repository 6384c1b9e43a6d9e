#include "plateau/ruling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "plateau/errors.hpp"
#include "plateau/numeric.hpp"

namespace plateau {

double default_tolerance(double t_bar) { return 1e-12 * (1.0 + t_bar); }

double q_phi(double s, double lam, const LenticularDomain& D, const BoundaryDatum& phi) {
  return lam - s + 2.0 * (D.gamma2()(lam) - D.gamma1()(s)) * (phi.phi2(lam) + phi.phi1(s));
}

RulingSolver::RulingSolver(PlateauProblem problem, double tol)
    : problem_(std::move(problem)), tol_(tol > 0.0 ? tol : default_tolerance(problem_.domain.t_bar())) {
  if (!problem_.zeta.gate_interp)
    throw GateError("interp", fmt::format("interpolation stage requires zeta < 1, got zeta = {:.17g}",
                                          problem_.zeta.zeta));
}

double RulingSolver::q(double s, double lam) const { return q_phi(s, lam, domain(), datum()); }

double RulingSolver::dq_dlambda(double s, double lam) const {
  const auto& D = domain();
  const auto& p = datum();
  return 1.0 + 2.0 * D.gamma2().derivative(lam) * (p.phi2(lam) + p.phi1(s)) +
         2.0 * (D.gamma2()(lam) - D.gamma1()(s)) * p.phi2.derivative(lam);
}

double RulingSolver::dq_ds(double s, double lam) const {
  const auto& D = domain();
  const auto& p = datum();
  return -1.0 - 2.0 * D.gamma1().derivative(s) * (p.phi2(lam) + p.phi1(s)) +
         2.0 * (D.gamma2()(lam) - D.gamma1()(s)) * p.phi1.derivative(s);
}

double RulingSolver::lambda_at(double s) const {
  const double tb = t_bar();
  if (s <= 0.0 && s >= -1e-12 * std::max(1.0, tb)) return 0.0;
  if (s >= tb && s <= tb * (1.0 + 1e-12)) return tb;
  if (s < 0.0 || s > tb) throw DomainError(fmt::format("s = {:.17g} outside [0, {}]", s, tb));
  const double q0 = q(s, 0.0), q1 = q(s, tb);
  if (!(q0 < 0.0) || !(q1 > 0.0))
    throw PreconditionError(fmt::format(
        "Q_phi(s, .) does not change sign on [0, t_bar] at s = {:.17g} (Q(s,0) = {:.3g}, "
        "Q(s,t_bar) = {:.3g})",
        s, q0, q1));
  // γ1(s), φ1(s) are fixed during the solve; Q and ∂Q/∂λ share the λ-side evaluations.
  const auto& D = domain();
  const auto& p = datum();
  const double g1 = D.gamma1()(s), f1 = p.phi1(s);
  double cached_x = std::numeric_limits<double>::quiet_NaN(), cached_d = 1.0;
  auto f = [&](double l) {
    const double g2 = D.gamma2()(l), f2 = p.phi2(l);
    cached_x = l;
    cached_d = 1.0 + 2.0 * D.gamma2().derivative(l) * (f2 + f1) + 2.0 * (g2 - g1) * p.phi2.derivative(l);
    return l - s + 2.0 * (g2 - g1) * (f2 + f1);
  };
  auto df = [&](double l) { return l == cached_x ? cached_d : dq_dlambda(s, l); };
  const double lam = bracketed_newton(f, df, 0.0, tb, s);
  const double r = std::abs(q(s, lam));
  if (r > tol_)
    throw ConsistencyError(fmt::format("lambda solve at s = {:.17g} left residual {:.3g}", s, r));
  return lam;
}

double RulingSolver::lambda_inverse(double ell) const {
  const double tb = t_bar();
  if (ell <= 0.0 && ell >= -1e-12 * std::max(1.0, tb)) return 0.0;
  if (ell >= tb && ell <= tb * (1.0 + 1e-12)) return tb;
  if (ell < 0.0 || ell > tb) throw DomainError(fmt::format("lambda value {:.17g} outside [0, {}]", ell, tb));
  // Q is decreasing in s.
  const double g0 = -q(0.0, ell), g1 = -q(tb, ell);
  if (!(g0 < 0.0) || !(g1 > 0.0))
    throw PreconditionError(fmt::format("Q_phi(., l) does not change sign at l = {:.17g}", ell));
  return bracketed_newton([&](double s) { return -q(s, ell); },
                          [&](double s) { return -dq_ds(s, ell); }, 0.0, tb, ell);
}

double RulingSolver::lambda_slope(double s, double lam) const {
  return -dq_ds(s, lam) / dq_dlambda(s, lam);
}

HPoint RulingSolver::lift_p1(double s) const {
  const double g = domain().gamma1()(s), f = datum().phi1(s);
  return {f, g, s + 2.0 * g * f};
}

HPoint RulingSolver::lift_p2(double s) const {
  const double g = domain().gamma2()(s), f = datum().phi2(s);
  return {f, g, s + 2.0 * g * f};
}

RulingDirection RulingSolver::direction(double s) const { return direction_at(s, lambda_at(s)); }

RulingDirection RulingSolver::direction_at(double s, double lam) const {
  if (!(s > 0.0 && s < t_bar()))
    throw PreconditionError(fmt::format("ruling direction needs 0 < s < t_bar, got s = {:.17g}", s));
  RulingDirection d;
  d.lambda = lam;
  d.alpha_bar = datum().phi2(lam) - datum().phi1(s);
  d.beta_bar = domain().gamma2()(lam) - domain().gamma1()(s);
  if (!(d.beta_bar > 0.0))
    throw ConsistencyError(fmt::format("beta_bar = {:.3g} <= 0 at s = {:.17g}", d.beta_bar, s));
  return d;
}

HPoint RulingSolver::rho(double h, double s) const { return rho_at(h, s, lambda_at(s)); }

HPoint RulingSolver::rho_at(double h, double s, double lam) const {
  const HPoint a = lift_p1(s), b = lift_p2(lam);
  return {(1.0 - h) * a.x + h * b.x, (1.0 - h) * a.y + h * b.y, (1.0 - h) * a.t + h * b.t};
}

RhoTangents RulingSolver::tangents(double h, double s, double lam) const {
  const auto& D = domain();
  const auto& p = datum();
  const double g1 = D.gamma1()(s), dg1 = D.gamma1().derivative(s);
  const double f1 = p.phi1(s), df1 = p.phi1.derivative(s);
  const double g2 = D.gamma2()(lam), dg2 = D.gamma2().derivative(lam);
  const double f2 = p.phi2(lam), df2 = p.phi2.derivative(lam);
  const double dl = lambda_slope(s, lam);
  RhoTangents out;
  out.d_h = lift_p2(lam) - lift_p1(s);
  const HVector dp1{df1, dg1, 1.0 + 2.0 * (dg1 * f1 + g1 * df1)};
  const HVector dp2{df2 * dl, dg2 * dl, (1.0 + 2.0 * (dg2 * f2 + g2 * df2)) * dl};
  out.d_s = {(1.0 - h) * dp1.a + h * dp2.a, (1.0 - h) * dp1.b + h * dp2.b,
             (1.0 - h) * dp1.c + h * dp2.c};
  return out;
}

LambdaMap build_lambda_map(const RulingSolver& solver, int n) {
  if (n < 3) throw PreconditionError("lambda map needs at least 3 nodes");
  const double tb = solver.t_bar();
  LambdaMap m;
  m.grid.resize(n);
  m.values.resize(n);
  const double h = tb / (n - 1);
  for (int i = 0; i < n; ++i) m.grid[i] = i == n - 1 ? tb : i * h;
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) { m.values[i] = solver.lambda_at(m.grid[i]); });

  for (int i = 0; i < n; ++i) m.residual_max = std::max(m.residual_max, std::abs(solver.q(m.grid[i], m.values[i])));
  for (int i = 1; i < n; ++i)
    if (!(m.values[i] > m.values[i - 1]))
      throw ConsistencyError(fmt::format(
          "lambda not strictly increasing between s = {:.17g} and {:.17g}; zeta likely misestimated",
          m.grid[i - 1], m.grid[i]));

  const double z = solver.zeta();
  m.zeta = z;
  m.bound_lo = (1.0 - z) / (1.0 + z);
  m.bound_hi = (1.0 + z) / (1.0 - z);
  m.eps_grid = 2.0 * solver.tol() / h;
  m.lip_lo = std::numeric_limits<double>::infinity();
  m.lip_hi = 0.0;
  for (int i = 1; i < n; ++i) {
    const double slope = (m.values[i] - m.values[i - 1]) / (m.grid[i] - m.grid[i - 1]);
    if (i == 1) {
      m.endpoint_slope_first = slope;
      continue;
    }
    if (i == n - 1) {
      m.endpoint_slope_last = slope;
      continue;
    }
    m.lip_lo = std::min(m.lip_lo, slope);
    m.lip_hi = std::max(m.lip_hi, slope);
  }
  if (n == 3) {  // no interior cell: fall back to the two pinch cells
    m.lip_lo = std::min(m.endpoint_slope_first, m.endpoint_slope_last);
    m.lip_hi = std::max(m.endpoint_slope_first, m.endpoint_slope_last);
  }
  m.inv_lip_lo = 1.0 / m.lip_hi;
  m.inv_lip_hi = 1.0 / m.lip_lo;
  const double lo = m.bound_lo - m.eps_grid, hi = m.bound_hi + m.eps_grid;
  m.certificate_violation = std::max({0.0, lo - m.lip_lo, m.lip_hi - hi, lo - m.inv_lip_lo,
                                      m.inv_lip_hi - hi});
  m.certified = m.certificate_violation == 0.0;
  return m;
}

std::vector<double> RuledSurface::burgers_per_node() const {
  const std::size_t n = n_s();
  std::vector<double> b(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) b[i] = alpha_bar[i] / beta_bar[i];
  if (n >= 3) {
    b[0] = b[1];
    b[n - 1] = b[n - 2];
  }
  return b;
}

RuledSurface build_ruled_surface(const RulingSolver& solver, int n_s, int n_h) {
  if (n_h < 2) throw PreconditionError("ruled surface needs at least 2 nodes along each ruling");
  RuledSurface R;
  R.lambda = build_lambda_map(solver, n_s);
  const auto& s = R.lambda.grid;
  const auto& lam = R.lambda.values;
  const std::size_t ns = s.size(), nh = static_cast<std::size_t>(n_h);
  R.h.resize(nh);
  for (std::size_t j = 0; j < nh; ++j) R.h[j] = j + 1 == nh ? 1.0 : static_cast<double>(j) / (nh - 1);
  R.p1.resize(ns);
  R.p2.resize(ns);
  R.alpha_bar.assign(ns, 0.0);
  R.beta_bar.assign(ns, 0.0);
  R.mesh.resize(ns * nh);
  std::vector<double> horiz(ns, 0.0), lift_dev(ns, 0.0);
  static constexpr double kProbeH[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  parallel_for(ns, [&](std::size_t i) {
    R.p1[i] = solver.lift_p1(s[i]);
    R.p2[i] = solver.lift_p2(lam[i]);
    if (i > 0 && i + 1 < ns) {
      const auto d = solver.direction_at(s[i], lam[i]);
      R.alpha_bar[i] = d.alpha_bar;
      R.beta_bar[i] = d.beta_bar;
    }
    const HVector v = R.p2[i] - R.p1[i];
    double worst = 0.0;
    for (std::size_t j = 0; j < nh; ++j) {
      R.mesh[i * nh + j] = solver.rho_at(R.h[j], s[i], lam[i]);
      worst = std::max(worst, std::abs(horizontality_residual(R.mesh[i * nh + j], v)));
    }
    for (double hh : kProbeH)
      worst = std::max(worst, std::abs(horizontality_residual(solver.rho_at(hh, s[i], lam[i]), v)));
    horiz[i] = worst;
    auto dist = [](const HPoint& a, const HPoint& b) {
      return std::max({std::abs(a.x - b.x), std::abs(a.y - b.y), std::abs(a.t - b.t)});
    };
    lift_dev[i] = std::max(dist(R.mesh[i * nh], R.p1[i]), dist(R.mesh[i * nh + nh - 1], R.p2[i]));
  });
  // The two pinch rows collapse onto the boundary lifts as well.
  for (std::size_t i : {std::size_t{0}, ns - 1})
    for (std::size_t j = 0; j < nh; ++j) {
      const HPoint& m = R.mesh[i * nh + j];
      const HPoint& ref = i == 0 ? R.p1[0] : R.p1[ns - 1];
      lift_dev[i] = std::max({lift_dev[i], std::abs(m.x - ref.x), std::abs(m.y - ref.y), std::abs(m.t - ref.t)});
    }
  for (std::size_t i = 0; i < ns; ++i) {
    R.horizontality_max = std::max(R.horizontality_max, horiz[i]);
    R.boundary_lift_deviation = std::max(R.boundary_lift_deviation, lift_dev[i]);
  }
  return R;
}

}  // namespace plateau
