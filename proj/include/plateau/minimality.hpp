#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "plateau/area.hpp"
#include "plateau/graph.hpp"

namespace plateau {

// w(y, t) = A·max(0, 1 − ((y−y0)/ry)² − ((t−t0)/rt)²)²: C¹ with
// sup|∂_t w| = 8A/(3√3·rt) and sup|∂_y w| = 8A/(3√3·ry).
struct BumpSpec {
  double y0 = 0.0, t0 = 0.0;
  double ry = 0.1, rt = 0.1;
  double amplitude = 1.0;
};

double bump_value(const BumpSpec& b, double y, double t);
double bump_dt_bound(const BumpSpec& b);

// Support ellipse, enlarged by one grid cell in each direction, lies inside D.
bool bump_support_inside(const BumpSpec& b, const LenticularDomain& D, const GraphFunction& u);

// v = u + eps·w on the grid of u. Throws PreconditionError if the support
// touches the boundary.
GraphFunction make_competitor(const GraphFunction& u, const LenticularDomain& D, const BumpSpec& b, double eps);

struct Admissibility {
  bool admissible = false;
  double min_slope = 0.0;
};
// t ↦ t + 4y·v(y, t) increasing on every row.
Admissibility check_admissible(const GraphFunction& v);

struct CompetitorReport {
  BumpSpec bump;
  double epsilon = 0.0;
  bool admissible = false;
  double min_beta_slope = 0.0;
  double area_u = 0.0;
  double area_v = 0.0;
  double margin = 0.0;  // area_v − area_u
  double sup_diff = 0.0;
};

CompetitorReport compare_areas(const GraphFunction& u, double area_u, const GraphFunction& v);

// Bumps with uniformly drawn centres and radii, kept when their support fits
// in D. The generator is std::mt19937_64 and only its raw 64-bit output is
// used, so reports are reproducible across platforms.
std::vector<BumpSpec> random_bumps(const LenticularDomain& D, const GraphFunction& u, std::uint64_t seed,
                                   int count);

std::vector<CompetitorReport> run_competitors(const GraphFunction& u, const LenticularDomain& D,
                                              const std::vector<BumpSpec>& bumps,
                                              const std::vector<double>& eps_list);

struct StationarityRung {
  double epsilon = 0.0;
  bool admissible = false;
  double slope = 0.0;  // (A(u+εw) − A(u−εw)) / 2ε
};

struct StationarityReport {
  std::vector<StationarityRung> rungs;
  std::vector<double> richardson;  // one per consecutive admissible pair
  double extrapolated = 0.0;
  std::vector<std::string> warnings;
};

StationarityReport stationarity_slope(const GraphFunction& u, const LenticularDomain& D, const BumpSpec& b,
                                      const std::vector<double>& eps_ladder);

struct ProbeOptions {
  int boundary_samples = 1025;
  int pair_radius_cells = 6;
  double lip_safety = 1.0;
};

struct RegularityProbeReport {
  WPoint w0;
  double r = 0.0;
  double rho = 0.0;
  double ell = 0.0;
  double rho_ell = 0.0;
  double v_sup = 0.0;
  double zeta_bound = 0.0;  // 8(1+2r)/r·[ρ‖v‖ + (1+2ρ/r)ρℓ]
  double zeta_local = 0.0;  // ζ of the lens problem with datum v|∂
  bool gate_passed = false;
  bool resolved = false;
  double max_deviation = 0.0;  // max |v − u_local| over grid nodes inside the lens
  std::size_t nodes_compared = 0;
  std::string note;
};

struct RegularityProbe {
  std::vector<RegularityProbeReport> rungs;
  double trend_slope = 0.0;  // least-squares slope of log(ρℓ) against log ρ
  bool any_resolved = false;
};

// The ball B_r(w0) is intersected with the sampled domain of v.
RegularityProbe regularity_probe(const GraphFunction& v, const WPoint& w0, double r,
                                 const std::vector<double>& rho_ladder, const ProbeOptions& opts = {});

}  // namespace plateau
