#include "plateau/calibration.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "plateau/errors.hpp"
#include "plateau/numeric.hpp"

namespace plateau {

FrameVector normal_at(const RulingSolver& solver, double s) {
  const auto d = solver.direction(s);
  const double n = std::hypot(d.alpha_bar, d.beta_bar);
  if (!(n > 0.0)) throw ConsistencyError(fmt::format("degenerate ruling at s = {:.17g}", s));
  return {d.beta_bar / n, -d.alpha_bar / n};
}

CalibrationEvaluator::CalibrationEvaluator(const GraphInverter& inv, double mu_offset)
    : inv_(&inv), mu_offset_(mu_offset) {}

CalibrationEvaluator::Value CalibrationEvaluator::from_s(double s) const {
  const auto nu = normal_at(inv_->solver(), s);
  return {nu.x, nu.y + mu_offset_, s};
}

CalibrationEvaluator::Value CalibrationEvaluator::at(double eta, double tau) const {
  return at(inv_->interval_J(eta), tau);
}

CalibrationEvaluator::Value CalibrationEvaluator::at(const JInterval& J, double tau) const {
  const auto smp = inv_->invert_right(J, tau);
  const double tb = inv_->solver().t_bar();
  if (!(smp.s > 0.0 && smp.s < tb))
    throw DomainError(fmt::format("({:.17g}, {:.17g}) projects onto a pinch point", J.y, tau));
  return from_s(smp.s);
}

CalibrationEvaluator::Value CalibrationEvaluator::ambient(const HPoint& p) const {
  const WPoint w = project_right(p);
  return at(w.y, w.t);
}

Rect inscribed_rectangle(const RightDomainTable& T, int margin_cells) {
  const std::size_t n = T.y.size();
  if (n < 2) throw PreconditionError("right-domain table needs at least 2 rows");
  double best = -1.0;
  Rect r;
  std::size_t bi = 0, bj = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double lo = T.tau_lo[i], hi = T.tau_hi[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      lo = std::max(lo, T.tau_lo[j]);
      hi = std::min(hi, T.tau_hi[j]);
      if (hi <= lo) break;
      const double area = (T.y[j] - T.y[i]) * (hi - lo);
      if (area > best) {
        best = area;
        r = {T.y[i], T.y[j], lo, hi};
        bi = i;
        bj = j;
      }
    }
  }
  if (best <= 0.0) throw ConsistencyError("no rectangle fits inside the right domain");
  const double m = static_cast<double>(margin_cells);
  double cell = 0.0;
  for (std::size_t k = bi; k <= bj; ++k) cell = std::max(cell, T.cell[k]);
  const double dy_lo = bi + 1 < n ? T.y[bi + 1] - T.y[bi] : 0.0;
  const double dy_hi = bj > 0 ? T.y[bj] - T.y[bj - 1] : 0.0;
  r.eta_lo += m * dy_lo;
  r.eta_hi -= m * dy_hi;
  r.tau_lo += m * cell;
  r.tau_hi -= m * cell;
  if (!(r.eta_hi > r.eta_lo && r.tau_hi > r.tau_lo)) throw ConsistencyError("inscribed rectangle vanished after margin");
  return r;
}

namespace {

void finish(CalibrationField& f) {
  for (std::size_t i = 0; i < f.eta.size(); ++i)
    for (std::size_t k = 0; k < f.tau[i].size(); ++k) {
      const double l = f.lambda_bar[i][k], m = f.mu_bar[i][k];
      f.unit_norm_max = std::max(f.unit_norm_max, std::abs(l * l + m * m - 1.0));
      f.sup_deviation = std::max(f.sup_deviation, std::hypot(l - 1.0, m));
    }
}

void fill(const CalibrationEvaluator& ev, CalibrationField& f) {
  const std::size_t ne = f.eta.size();
  f.lambda_bar.assign(ne, {});
  f.mu_bar.assign(ne, {});
  f.s.assign(ne, {});
  std::vector<JInterval> Js(ne);
  parallel_for(ne, [&](std::size_t i) { Js[i] = ev.inverter().interval_J(f.eta[i]); });
  std::vector<std::pair<std::size_t, std::size_t>> idx;
  for (std::size_t i = 0; i < ne; ++i) {
    f.lambda_bar[i].assign(f.tau[i].size(), 0.0);
    f.mu_bar[i].assign(f.tau[i].size(), 0.0);
    f.s[i].assign(f.tau[i].size(), 0.0);
    for (std::size_t k = 0; k < f.tau[i].size(); ++k) idx.emplace_back(i, k);
  }
  parallel_for(idx.size(), [&](std::size_t n) {
    const auto [i, k] = idx[n];
    const auto v = ev.at(Js[i], f.tau[i][k]);
    f.lambda_bar[i][k] = v.lambda_bar;
    f.mu_bar[i][k] = v.mu_bar;
    f.s[i][k] = v.s;
  });
  finish(f);
}

}  // namespace

CalibrationField build_field(const CalibrationEvaluator& ev, const RightDomainTable& table, int n_tau) {
  if (n_tau < 3) throw PreconditionError("calibration rows need at least 3 nodes");
  CalibrationField f;
  // Row ends sit on the boundary of D^r and may project onto the pinch; keep
  // the open row only.
  for (std::size_t i = 0; i < table.y.size(); ++i) {
    f.eta.push_back(table.y[i]);
    std::vector<double> t;
    for (int k = 1; k < n_tau - 1; ++k)
      t.push_back(table.tau_lo[i] + (table.tau_hi[i] - table.tau_lo[i]) * k / (n_tau - 1));
    f.tau.push_back(std::move(t));
  }
  fill(ev, f);
  return f;
}

CalibrationField build_field(const CalibrationEvaluator& ev, const Rect& rect, int n_eta, int n_tau) {
  if (n_eta < 3 || n_tau < 3) throw PreconditionError("calibration grid needs at least 3x3 nodes");
  CalibrationField f;
  f.rectangular = true;
  std::vector<double> t(n_tau);
  for (int k = 0; k < n_tau; ++k)
    t[k] = k == n_tau - 1 ? rect.tau_hi : rect.tau_lo + (rect.tau_hi - rect.tau_lo) * k / (n_tau - 1);
  for (int i = 0; i < n_eta; ++i) {
    f.eta.push_back(i == n_eta - 1 ? rect.eta_hi : rect.eta_lo + (rect.eta_hi - rect.eta_lo) * i / (n_eta - 1));
    f.tau.push_back(t);
  }
  fill(ev, f);
  return f;
}

DivergenceReport divergence_residual(const CalibrationField& f) {
  if (!f.rectangular) throw PreconditionError("divergence needs a field on a rectangular grid");
  const std::size_t ne = f.eta.size();
  DivergenceReport rep;
  rep.residual.assign(ne, std::vector<double>(f.tau.empty() ? 0 : f.tau[0].size(), 0.0));
  for (std::size_t i = 1; i + 1 < ne; ++i) {
    const auto& t = f.tau[i];
    for (std::size_t k = 1; k + 1 < t.size(); ++k) {
      const double dmu = (f.mu_bar[i + 1][k] - f.mu_bar[i - 1][k]) / (f.eta[i + 1] - f.eta[i - 1]);
      const double dlam = (f.lambda_bar[i][k + 1] - f.lambda_bar[i][k - 1]) / (t[k + 1] - t[k - 1]);
      const double r = dmu + 4.0 * f.eta[i] * dlam;
      rep.residual[i][k] = r;
      rep.max_interior = std::max(rep.max_interior, std::abs(r));
    }
  }
  return rep;
}

NormalAgreement normal_agreement(const CalibrationEvaluator& ev, const GraphFunction& u, const ScalarField2D& B) {
  const auto& solver = ev.inverter().solver();
  std::vector<std::pair<std::size_t, std::size_t>> nodes;
  for (std::size_t i = 0; i < u.rows.size(); ++i)
    for (std::size_t k = 1; k + 1 < u.rows[i].t.size(); ++k) nodes.emplace_back(i, k);
  std::vector<JInterval> Js(u.rows.size());
  parallel_for(u.rows.size(), [&](std::size_t i) { Js[i] = ev.inverter().interval_J(u.rows[i].y); });
  struct Gap {
    double comp = 0.0, inner = 0.0, fd = 0.0;
  };
  std::vector<Gap> gaps(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t n) {
    const auto [i, k] = nodes[n];
    const auto& r = u.rows[i];
    const auto nu = normal_at(solver, r.s[k]);
    const WPoint w = project_right(lift_left({r.y, r.t[k]}, r.u[k]));
    const auto om = ev.at(Js[i], w.t);
    Gap g;
    g.comp = std::max(std::abs(om.lambda_bar - nu.x), std::abs(om.mu_bar - nu.y));
    g.inner = std::abs(1.0 - (om.lambda_bar * nu.x + om.mu_bar * nu.y));
    if (!B.empty()) {
      const double b = B[i][k], q = std::sqrt(1.0 + b * b);
      g.fd = std::max(std::abs(1.0 / q - nu.x), std::abs(-b / q - nu.y));
    }
    gaps[n] = g;
  });
  NormalAgreement rep;
  rep.samples = nodes.size();
  for (const auto& g : gaps) {
    rep.max_component_gap = std::max(rep.max_component_gap, g.comp);
    rep.max_inner_gap = std::max(rep.max_inner_gap, g.inner);
    rep.max_fd_gap = std::max(rep.max_fd_gap, g.fd);
  }
  return rep;
}

}  // namespace plateau
