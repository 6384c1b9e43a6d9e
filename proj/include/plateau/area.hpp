#pragma once

#include <vector>

#include "plateau/graph.hpp"
#include "plateau/ruling.hpp"

namespace plateau {

// Node-wise field on the row grid of a GraphFunction.
using ScalarField2D = NodeField;

// B u = ∂u/∂y − 2 ∂(u²)/∂t, conservative form, by the finite differences of
// fd_dy / fd_dt.
ScalarField2D burgers_fd(const GraphFunction& u);

// ᾱ(s)/β̄(s): the value of B u on the whole ruling through p1(s).
double burgers_on_ruling(const RulingSolver& solver, double s);

// ∫ f dt over one row: Simpson when the node count is odd, trapezoid otherwise.
double row_integral(const GraphRow& row, const std::vector<double>& f);

// A_H(u) = ∫_D √(1 + (B u)²) dy dt with the row weights of the graph.
double h_area_domain(const GraphFunction& u, const ScalarField2D& B);
double h_area_domain(const GraphFunction& u);

struct SurfaceArea {
  double value = 0.0;
  std::size_t cells = 0;
  std::size_t skipped_cells = 0;
  double skipped_bound = 0.0;  // upper bound on the area left out by skipped cells
};

// ∫ |(⟨N, X⟩, ⟨N, Y⟩)| dh ds with N = ∂ρ/∂h × ∂ρ/∂s, per (h, s) cell of the
// ruled surface mesh with a gauss×gauss Gauss–Legendre rule (1 = midpoint).
// Tangents are exact: λ is solved at each quadrature abscissa and λ' comes
// from implicit differentiation.
SurfaceArea h_area_surface(const RulingSolver& solver, const RuledSurface& R, int gauss = 2);

// ∫₀^t̄ (γ2 − γ1) dt.
double lebesgue_area(const LenticularDomain& D);

struct RulingSpread {
  double max_spread = 0.0;       // max over rulings of (max − min) of interpolated B u
  double max_formula_gap = 0.0;  // max |interpolated B u − ᾱ/β̄|
  std::size_t rulings = 0;
  std::size_t points = 0;
  std::size_t skipped_points = 0;
};

// For n_s uniformly spaced interior rulings, samples five points at
// h = 1/6, …, 5/6, projects them to D and interpolates the B field there.
RulingSpread ruling_spread(const RulingSolver& solver, const GraphFunction& u, const ScalarField2D& B,
                           int n_s);

}  // namespace plateau
