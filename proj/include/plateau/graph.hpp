#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "plateau/ruling.hpp"

namespace plateau {

// s-interval J_y of rulings crossing the row at height y, with the t-slice of
// D it covers: τ_y(s_lo) = t_lo and τ_y(s_hi) = t_hi.
struct JInterval {
  double y = 0.0;
  double s_lo = 0.0, s_hi = 0.0;
  double t_lo = 0.0, t_hi = 0.0;
  bool empty = true;
  bool at_extremum = false;
};

struct InversionSample {
  double h = 0.0;
  double s = 0.0;
  double lambda = 0.0;
  double u = 0.0;
  double residual = 0.0;
};

class GraphInverter {
 public:
  explicit GraphInverter(RulingSolver solver);

  const RulingSolver& solver() const { return solver_; }

  double h_y(double s, double y) const;
  JInterval interval_J(double y) const;
  double tau(double s, double y) const;
  double tau_right(double s, double y) const;

  // φ at the boundary point of row y with abscissa t (t must be a slice end).
  double boundary_value(const JInterval& J, double t) const;

  InversionSample invert_left(double y, double t) const;
  InversionSample invert_left(const JInterval& J, double t) const;
  InversionSample invert_right(double eta, double tau) const;
  InversionSample invert_right(const JInterval& J, double tau) const;

  // Row interval (β(t_lo), β(t_hi)) of the right domain, β(t) = t + 4y·φ.
  std::pair<double, double> right_interval(const JInterval& J) const;

 private:
  struct Eval {
    double lam, h, tau, rho1;
  };
  Eval eval(double s, double y) const;

  RulingSolver solver_;
};

enum class GraphSide { Left, Right };

struct GraphRow {
  double y = 0.0;
  double weight = 0.0;  // quadrature weight in y
  double t_lo = 0.0, t_hi = 0.0;
  std::vector<double> t;
  std::vector<double> u;
  std::vector<double> s;  // ruling parameter per node (empty for competitors)
  std::vector<double> h;
};

using NodeField = std::vector<std::vector<double>>;

struct GraphFunction {
  GraphSide side = GraphSide::Left;
  double y_lo = 0.0, y_hi = 0.0;
  std::vector<GraphRow> rows;
  double boundary_residual = 0.0;
  double lip_estimate = 0.0;
  double max_inversion_residual = 0.0;

  NodeField values() const;
  std::size_t node_count() const;
};

struct RowLayout {
  std::vector<double> y;
  std::vector<double> weight;
};

// Rows in the open interval (y_lo, y_hi): on each side of y = 0 the rows sit at
// y = y_ext·(1 − σ²) for uniform σ, which resolves the square-root closing of the
// slices at the tips; y = 0 is always a row. Weights are composite Simpson in σ.
RowLayout row_layout(double y_lo, double y_hi, int n_y);

struct GridSpec {
  int n_y = 129;
  int n_t = 129;
};

GraphFunction left_graph(const GraphInverter& inv, const GridSpec& grid);

struct BetaCheck {
  double min_slope = 1.0;
  double worst_y = 0.0;
  std::vector<double> per_row;
};

// t ↦ t + 4y·v(y, t) on one row of v.
std::function<double(double)> beta_curve(const GraphFunction& v, std::size_t row);
BetaCheck beta_monotonicity(const GraphFunction& v);

struct RightDomainTable {
  std::vector<double> y;
  std::vector<double> tau_lo;
  std::vector<double> tau_hi;
  std::vector<double> cell;  // τ spacing per row, used as inset
  std::vector<double> weight;

  // Linear interpolation between rows with a one-cell inset.
  bool contains(double eta, double tau) const;
};

RightDomainTable right_domain(const GraphInverter& inv, const GraphFunction& u);
GraphFunction right_graph(const GraphInverter& inv, const RightDomainTable& table, int n_t);

struct RoundTripReport {
  double max_deviation = 0.0;
  std::size_t samples = 0;
};
// For interior samples of u: lift, project with π^r, invert on the right and
// compare the surface points.
RoundTripReport round_trip_deviation(const GraphInverter& inv, const GraphFunction& u);

struct InjectivityReport {
  double max_parameter_deviation = 0.0;
  std::size_t samples = 0;
};
// Forward-backward witness: (h, s) ↦ π(ρ(h, s)) ↦ invert_left must return (h, s).
InjectivityReport injectivity_witness(const GraphInverter& inv, int n_s, int n_h);

// Tau-slope certificates on J_y sampled at n points for each of the given rows.
struct TauSlopeReport {
  double min_left_slope = 0.0;
  double min_right_slope = 0.0;
  double left_bound = 0.0;
  double right_bound = 0.0;
};
TauSlopeReport tau_slopes(const GraphInverter& inv, const std::vector<double>& ys, int n);

// Finite differences on the row grid of g. d_dt: in-row second-order central,
// one-sided at the row ends. d_dy: three-point stencil in y on neighbouring rows
// evaluated at the same t by cubic interpolation along each row.
NodeField fd_dt(const GraphFunction& g, const NodeField& f);
NodeField fd_dy(const GraphFunction& g, const NodeField& f);

// Value of a node field at an arbitrary (y, t), cubic along rows and cubic (or
// linear) across rows that cover t. Empty when no covering rows bracket y.
std::optional<double> interpolate_field(const GraphFunction& g, const NodeField& f, double y,
                                        double t);

}  // namespace plateau
