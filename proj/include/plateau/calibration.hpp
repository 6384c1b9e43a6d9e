#pragma once

#include <vector>

#include "plateau/area.hpp"
#include "plateau/graph.hpp"

namespace plateau {

struct FrameVector {
  double x = 0.0;  // X component
  double y = 0.0;  // Y component
};

// Unit normal (β, −α) of the surface along the ruling through p1(s), with
// (α, β) the normalized ruling direction.
FrameVector normal_at(const RulingSolver& solver, double s);

// Pointwise calibration field on the right domain: ω(η, τ) is the normal of
// the ruling met by the X^r-fibre over (η, τ). Its ambient extension is
// constant along X^r, so it only ever needs π^r(p).
class CalibrationEvaluator {
 public:
  explicit CalibrationEvaluator(const GraphInverter& inv, double mu_offset = 0.0);

  struct Value {
    double lambda_bar = 1.0;
    double mu_bar = 0.0;
    double s = 0.0;
  };
  Value at(double eta, double tau) const;
  Value at(const JInterval& J, double tau) const;
  // ω at an ambient point of the right cylinder.
  Value ambient(const HPoint& p) const;

  const GraphInverter& inverter() const { return *inv_; }

 private:
  Value from_s(double s) const;
  const GraphInverter* inv_;
  double mu_offset_;
};

struct Rect {
  double eta_lo = 0.0, eta_hi = 0.0;
  double tau_lo = 0.0, tau_hi = 0.0;
};

// Largest axis-aligned rectangle spanned by consecutive table rows whose
// τ-interval fits in every row, shrunk by `margin_cells` cells on each side.
Rect inscribed_rectangle(const RightDomainTable& table, int margin_cells = 1);

struct CalibrationField {
  std::vector<double> eta;
  std::vector<std::vector<double>> tau;  // per η row
  NodeField lambda_bar;
  NodeField mu_bar;
  NodeField s;
  bool rectangular = false;
  double unit_norm_max = 0.0;  // max |λ̄² + μ̄² − 1|
  double sup_deviation = 0.0;  // max |(λ̄, μ̄) − (1, 0)|
};

// Field on the rows of the right-domain table (n_tau uniform nodes per row).
CalibrationField build_field(const CalibrationEvaluator& ev, const RightDomainTable& table, int n_tau);
// Field on a uniform n_eta × n_tau tensor grid over a rectangle inside D^r.
CalibrationField build_field(const CalibrationEvaluator& ev, const Rect& rect, int n_eta, int n_tau);

struct DivergenceReport {
  NodeField residual;       // ∂_η μ̄ + 4η ∂_τ λ̄; zero on the rectangle border
  double max_interior = 0.0;
};
// Central differences on a rectangular field.
DivergenceReport divergence_residual(const CalibrationField& field);

struct NormalAgreement {
  double max_component_gap = 0.0;  // |ω(π^r(p)) − ν(p)| componentwise
  double max_inner_gap = 0.0;      // |1 − ⟨ω, ν⟩|
  double max_fd_gap = 0.0;         // |(1, −B u)/√(1 + B u²) − ν| with finite-difference B u
  std::size_t samples = 0;
};
// Over the interior samples of the left graph u; B may be empty to skip the
// finite-difference comparison.
NormalAgreement normal_agreement(const CalibrationEvaluator& ev, const GraphFunction& u,
                                 const ScalarField2D& B = {});

}  // namespace plateau
