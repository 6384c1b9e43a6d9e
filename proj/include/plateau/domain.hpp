#pragma once

#include <string>
#include <vector>

#include "plateau/heisenberg.hpp"
#include "plateau/scalar_fn.hpp"

namespace plateau {

// Vertical slice {t : (y, t) ∈ D̄} of the lens at height y.
struct Slice {
  double t_lo = 0.0;
  double t_hi = 0.0;
  bool empty = true;
  bool at_extremum = false;  // y touches min γ1 or max γ2: the slice is a point
  double length() const { return empty ? 0.0 : t_hi - t_lo; }
};

/// D = {(y, t) : t ∈ (0, t̄), γ1(t) < y < γ2(t)} with γ1 convex, γ2 concave.
class LenticularDomain {
 public:
  LenticularDomain() = default;
  LenticularDomain(ScalarFn1D gamma1, ScalarFn1D gamma2);

  double t_bar() const { return gamma1_.t_bar(); }
  const ScalarFn1D& gamma1() const { return gamma1_; }
  const ScalarFn1D& gamma2() const { return gamma2_; }

  double y_min() const { return y_min_; }
  double y_max() const { return y_max_; }
  double argmin_gamma1() const { return arg_min_; }
  double argmax_gamma2() const { return arg_max_; }

  // Endpoints are the roots of γ1 = y (y < 0) or γ2 = y (y > 0), to full
  // precision; y = 0 gives (0, t̄).
  Slice slice(double y) const;
  bool contains(const WPoint& w) const;

 private:
  ScalarFn1D gamma1_, gamma2_;
  double y_min_ = 0.0, y_max_ = 0.0;
  double arg_min_ = 0.0, arg_max_ = 0.0;
};

/// Boundary datum carried as its two compositions with the boundary arcs:
/// φ1(s) = φ(γ1(s), s), φ2(s) = φ(γ2(s), s).
struct BoundaryDatum {
  ScalarFn1D phi1;
  ScalarFn1D phi2;
};

double threshold_interp();
double threshold_left();   // (√129 − 11)/4
double threshold_right();  // (√721 − 25)/48

struct GateInfo {
  std::string name;         // "interp" | "left" | "right"
  std::string closed_form;  // e.g. "zeta < (sqrt(129)-11)/4"
  double threshold;
};
const std::vector<GateInfo>& gate_table();

struct ZetaReport {
  double gamma_sup = 0.0;
  double gamma_lip = 0.0;
  double phi_sup = 0.0;
  double phi_lip = 0.0;
  double zeta = 0.0;
  bool gate_interp = false;
  bool gate_left = false;
  bool gate_right = false;
  bool gate(const std::string& name) const;
};

struct ValidationCheck {
  std::string name;
  bool passed = true;
  double worst_t = 0.0;
  double worst_value = 0.0;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool ok() const;
  std::vector<std::string> failures() const;
  const ValidationCheck& check(const std::string& name) const;
};

ValidationReport validate(const LenticularDomain& D, const BoundaryDatum& phi, int n_grid = 4097);

// Throws ValidationError when validate() reports a failure.
ZetaReport zeta_report(const LenticularDomain& D, const BoundaryDatum& phi, int n_grid = 4097,
                       double lip_safety = 1.0);

struct PlateauProblem {
  LenticularDomain domain;
  BoundaryDatum datum;
  ZetaReport zeta;
};

PlateauProblem make_problem(ScalarFn1D gamma1, ScalarFn1D gamma2, ScalarFn1D phi1,
                            ScalarFn1D phi2, int n_grid = 4097, double lip_safety = 1.0);

}  // namespace plateau
