#pragma once

#include <vector>

#include "plateau/domain.hpp"
#include "plateau/heisenberg.hpp"

namespace plateau {

double default_tolerance(double t_bar);  // 1e-12·(1 + t̄)

// Q_φ(s, λ) = λ − s + 2(γ2(λ) − γ1(s))(φ2(λ) + φ1(s)); its zero set pairs
// p1(s) with the boundary point p2(λ) so that the joining segment is horizontal.
double q_phi(double s, double lam, const LenticularDomain& D, const BoundaryDatum& phi);

struct RulingDirection {
  double lambda = 0.0;
  double alpha_bar = 0.0;  // φ2(λ) − φ1(s), X component
  double beta_bar = 0.0;   // γ2(λ) − γ1(s), Y component
};

struct RhoTangents {
  HVector d_h;
  HVector d_s;
};

class RulingSolver {
 public:
  // Throws GateError("interp") when ζ ≥ 1.
  explicit RulingSolver(PlateauProblem problem, double tol = 0.0);

  const PlateauProblem& problem() const { return problem_; }
  const LenticularDomain& domain() const { return problem_.domain; }
  const BoundaryDatum& datum() const { return problem_.datum; }
  double t_bar() const { return problem_.domain.t_bar(); }
  double zeta() const { return problem_.zeta.zeta; }
  double tol() const { return tol_; }

  double q(double s, double lam) const;
  double dq_dlambda(double s, double lam) const;
  double dq_ds(double s, double lam) const;

  // λ(s), solved to full precision in the bracket [0, t̄]; exact at the pinch.
  double lambda_at(double s) const;
  // λ⁻¹(ℓ): the s with Q(s, ℓ) = 0.
  double lambda_inverse(double ell) const;
  // λ'(s) by implicit differentiation, λ' = −Q_s / Q_λ.
  double lambda_slope(double s, double lam) const;

  HPoint lift_p1(double s) const;
  HPoint lift_p2(double s) const;

  // Requires 0 < s < t̄; throws ConsistencyError if β̄ ≤ 0.
  RulingDirection direction(double s) const;
  RulingDirection direction_at(double s, double lam) const;

  HPoint rho(double h, double s) const;
  HPoint rho_at(double h, double s, double lam) const;
  RhoTangents tangents(double h, double s, double lam) const;

 private:
  PlateauProblem problem_;
  double tol_;
};

struct LambdaMap {
  std::vector<double> grid;
  std::vector<double> values;
  double zeta = 0.0;
  double bound_lo = 1.0;  // (1−ζ)/(1+ζ)
  double bound_hi = 1.0;  // (1+ζ)/(1−ζ)
  double eps_grid = 0.0;  // 2·tol/h
  // Interior cells only; the two cells touching the pinch are kept apart.
  double lip_lo = 1.0;
  double lip_hi = 1.0;
  double inv_lip_lo = 1.0;
  double inv_lip_hi = 1.0;
  double endpoint_slope_first = 1.0;
  double endpoint_slope_last = 1.0;
  double residual_max = 0.0;
  bool certified = false;
  // Distance by which interior slopes leave the window, 0 when inside.
  double certificate_violation = 0.0;
};

LambdaMap build_lambda_map(const RulingSolver& solver, int n);

struct RuledSurface {
  LambdaMap lambda;
  std::vector<HPoint> p1;  // p1(s_i)
  std::vector<HPoint> p2;  // p2(λ(s_i))
  std::vector<double> alpha_bar;
  std::vector<double> beta_bar;
  std::vector<double> h;   // mesh h values in [0, 1]
  std::vector<HPoint> mesh;  // ρ(h_j, s_i) at index i·n_h + j
  double horizontality_max = 0.0;
  double boundary_lift_deviation = 0.0;

  std::size_t n_s() const { return lambda.grid.size(); }
  std::size_t n_h() const { return h.size(); }
  const HPoint& at(std::size_t i, std::size_t j) const { return mesh[i * h.size() + j]; }
  // ᾱ/β̄ per s node; pinch nodes take the value of their interior neighbour.
  std::vector<double> burgers_per_node() const;
};

RuledSurface build_ruled_surface(const RulingSolver& solver, int n_s, int n_h);

}  // namespace plateau
