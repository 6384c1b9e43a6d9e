#include "plateau/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "plateau/errors.hpp"
#include "plateau/numeric.hpp"

namespace plateau {

namespace {

constexpr int kExtremumGrid = 4097;

// Minimizer of a convex function on [0, t̄].
std::pair<double, double> convex_min(const ScalarFn1D& f) {
  if (f.kind() == ScalarFn1D::Kind::PiecewiseLinear) {
    const auto& ts = f.sample_t();
    const auto& vs = f.sample_v();
    const auto k = static_cast<std::size_t>(std::min_element(vs.begin(), vs.end()) - vs.begin());
    return {ts[k], vs[k]};
  }
  const double tb = f.t_bar();
  const double h = tb / (kExtremumGrid - 1);
  int best = 0;
  double best_v = f(0.0);
  for (int i = 1; i < kExtremumGrid; ++i) {
    const double v = f(i == kExtremumGrid - 1 ? tb : i * h);
    if (v < best_v) {
      best_v = v;
      best = i;
    }
  }
  double arg = best == kExtremumGrid - 1 ? tb : best * h;
  const double a = std::max(0.0, (best - 1) * h);
  const double b = std::min(tb, (best + 1) * h);
  const double da = f.derivative(a), db = f.derivative(b);
  if (da < 0.0 && db > 0.0) {
    const double c = bracketed_newton([&](double x) { return f.derivative(x); },
                                      [&](double x) { return f.second_derivative(x); }, a, b, arg);
    if (f(c) <= best_v) {
      arg = c;
      best_v = f(c);
    }
  }
  return {arg, best_v};
}

// Root of the increasing function g on [a, b].
template <class G>
double increasing_root(G&& g, double a, double b) {
  return bracketed_illinois(g, a, b, g(a), g(b));
}

}  // namespace

LenticularDomain::LenticularDomain(ScalarFn1D gamma1, ScalarFn1D gamma2)
    : gamma1_(std::move(gamma1)), gamma2_(std::move(gamma2)) {
  if (std::abs(gamma1_.t_bar() - gamma2_.t_bar()) > 1e-14 * gamma1_.t_bar())
    throw PreconditionError("gamma1 and gamma2 must share the same interval [0, t_bar]");
  std::tie(arg_min_, y_min_) = convex_min(gamma1_);
  auto neg2 = gamma2_.scaled(-1.0);
  std::tie(arg_max_, y_max_) = convex_min(neg2);
  y_max_ = -y_max_;
}

Slice LenticularDomain::slice(double y) const {
  Slice s;
  const double tb = t_bar();
  if (y == 0.0) {
    s.t_lo = 0.0;
    s.t_hi = tb;
    s.empty = false;
    return s;
  }
  const double scale = std::max(std::abs(y_min_), std::abs(y_max_));
  const double touch = 4.0 * std::numeric_limits<double>::epsilon() * scale;
  if (y < 0.0) {
    if (y < y_min_ - touch) return s;
    if (y <= y_min_ + touch) {
      s.t_lo = s.t_hi = arg_min_;
      s.at_extremum = true;
      return s;
    }
    s.t_lo = increasing_root([&](double t) { return y - gamma1_(t); }, 0.0, arg_min_);
    s.t_hi = increasing_root([&](double t) { return gamma1_(t) - y; }, arg_min_, tb);
  } else {
    if (y > y_max_ + touch) return s;
    if (y >= y_max_ - touch) {
      s.t_lo = s.t_hi = arg_max_;
      s.at_extremum = true;
      return s;
    }
    s.t_lo = increasing_root([&](double t) { return gamma2_(t) - y; }, 0.0, arg_max_);
    s.t_hi = increasing_root([&](double t) { return y - gamma2_(t); }, arg_max_, tb);
  }
  s.empty = false;
  return s;
}

bool LenticularDomain::contains(const WPoint& w) const {
  if (w.t < 0.0 || w.t > t_bar()) return false;
  return gamma1_(w.t) <= w.y && w.y <= gamma2_(w.t);
}

double threshold_interp() { return 1.0; }
double threshold_left() { return (std::sqrt(129.0) - 11.0) / 4.0; }
double threshold_right() { return (std::sqrt(721.0) - 25.0) / 48.0; }

const std::vector<GateInfo>& gate_table() {
  static const std::vector<GateInfo> table{
      {"interp", "zeta < 1", threshold_interp()},
      {"left", "zeta < (sqrt(129)-11)/4", threshold_left()},
      {"right", "zeta < (sqrt(721)-25)/48", threshold_right()},
  };
  return table;
}

bool ZetaReport::gate(const std::string& name) const {
  if (name == "interp") return gate_interp;
  if (name == "left") return gate_left;
  if (name == "right") return gate_right;
  throw PreconditionError(fmt::format("unknown gate '{}'", name));
}

bool ValidationReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

std::vector<std::string> ValidationReport::failures() const {
  std::vector<std::string> out;
  for (const auto& c : checks)
    if (!c.passed)
      out.push_back(fmt::format("{} (worst at t = {:.17g}, value {:.17g})", c.name, c.worst_t,
                                c.worst_value));
  return out;
}

const ValidationCheck& ValidationReport::check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw PreconditionError(fmt::format("no validation check named '{}'", name));
}

ValidationReport validate(const LenticularDomain& D, const BoundaryDatum& phi, int n_grid) {
  if (n_grid < 8) throw PreconditionError("validation grid needs at least 8 nodes");
  const double tb = D.t_bar();
  const auto& g1 = D.gamma1();
  const auto& g2 = D.gamma2();
  const double h = tb / (n_grid - 1);
  std::vector<double> t(n_grid), v1(n_grid), v2(n_grid);
  double gsup = 0.0;
  for (int i = 0; i < n_grid; ++i) {
    t[i] = i == n_grid - 1 ? tb : i * h;
    v1[i] = g1(t[i]);
    v2[i] = g2(t[i]);
    gsup = std::max({gsup, std::abs(v1[i]), std::abs(v2[i])});
  }

  ValidationReport rep;
  auto worst_of = [&](const char* name, auto&& badness) {
    // badness(i) > 0 marks a violation; the largest is reported.
    ValidationCheck c{name, true, 0.0, -std::numeric_limits<double>::infinity()};
    for (int i = 0; i < n_grid; ++i) {
      const auto [bad, value] = badness(i);
      if (bad && (c.passed || value > c.worst_value)) {
        c.passed = false;
        c.worst_t = t[i];
        c.worst_value = value;
      }
    }
    if (c.passed) c.worst_value = 0.0;
    rep.checks.push_back(c);
  };

  worst_of("gamma1 < 0 in the interior", [&](int i) {
    const bool interior = i > 0 && i < n_grid - 1;
    return std::pair{interior && !(v1[i] < 0.0), v1[i]};
  });
  worst_of("gamma2 > 0 in the interior", [&](int i) {
    const bool interior = i > 0 && i < n_grid - 1;
    return std::pair{interior && !(v2[i] > 0.0), -v2[i]};
  });
  {
    const double tol = 1e-12 * (1.0 + gsup);
    ValidationCheck c{"pinch gamma(0) = gamma(t_bar) = 0", true, 0.0, 0.0};
    for (double tt : {0.0, tb}) {
      const double m = std::max(std::abs(g1(tt)), std::abs(g2(tt)));
      if (m > tol && m > c.worst_value) {
        c.passed = false;
        c.worst_t = tt;
        c.worst_value = m;
      }
    }
    rep.checks.push_back(c);
  }
  const double ctol = 1e-10 * (1.0 + gsup);
  worst_of("gamma1 convex", [&](int i) {
    if (i == 0 || i == n_grid - 1) return std::pair{false, 0.0};
    const double d2 = v1[i - 1] - 2.0 * v1[i] + v1[i + 1];
    return std::pair{d2 < -ctol, -d2};
  });
  worst_of("gamma2 concave", [&](int i) {
    if (i == 0 || i == n_grid - 1) return std::pair{false, 0.0};
    const double d2 = v2[i - 1] - 2.0 * v2[i] + v2[i + 1];
    return std::pair{d2 > ctol, d2};
  });
  {
    const double psup = std::max(sup_and_lip(phi.phi1, 257).sup, sup_and_lip(phi.phi2, 257).sup);
    const double tol = 1e-12 * (1.0 + psup);
    ValidationCheck c{"phi corner compatibility", true, 0.0, 0.0};
    for (double tt : {0.0, tb}) {
      const double m = std::abs(phi.phi1(tt) - phi.phi2(tt));
      if (m > tol && m > c.worst_value) {
        c.passed = false;
        c.worst_t = tt;
        c.worst_value = m;
      }
    }
    rep.checks.push_back(c);
  }
  return rep;
}

ZetaReport zeta_report(const LenticularDomain& D, const BoundaryDatum& phi, int n_grid,
                       double lip_safety) {
  const auto rep = validate(D, phi, std::max(n_grid, 8));
  if (!rep.ok()) throw ValidationError("invalid domain or boundary datum", rep.failures());
  const auto g1 = sup_and_lip(D.gamma1(), n_grid, lip_safety);
  const auto g2 = sup_and_lip(D.gamma2(), n_grid, lip_safety);
  const auto p1 = sup_and_lip(phi.phi1, n_grid, lip_safety);
  const auto p2 = sup_and_lip(phi.phi2, n_grid, lip_safety);
  ZetaReport z;
  z.gamma_sup = std::max(g1.sup, g2.sup);
  z.gamma_lip = std::max(g1.lip, g2.lip);
  z.phi_sup = std::max(p1.sup, p2.sup);
  z.phi_lip = std::max(p1.lip, p2.lip);
  z.zeta = 4.0 * (z.gamma_sup + z.gamma_lip) * (z.phi_sup + z.phi_lip);
  z.gate_interp = z.zeta < threshold_interp();
  z.gate_left = z.zeta < threshold_left();
  z.gate_right = z.zeta < threshold_right();
  return z;
}

PlateauProblem make_problem(ScalarFn1D gamma1, ScalarFn1D gamma2, ScalarFn1D phi1,
                            ScalarFn1D phi2, int n_grid, double lip_safety) {
  PlateauProblem p;
  p.domain = LenticularDomain(std::move(gamma1), std::move(gamma2));
  p.datum = {std::move(phi1), std::move(phi2)};
  p.zeta = zeta_report(p.domain, p.datum, n_grid, lip_safety);
  return p;
}

}  // namespace plateau
