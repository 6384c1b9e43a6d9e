#pragma once

// Closed-form primitives of the first Heisenberg group H = R^3 with the law
//   (x,y,t)·(ξ,η,τ) = (x+ξ, y+η, t+τ+2(yξ−xη)).
// No tolerances live here.

namespace plateau {

/// Point (x, y, t) of the group.
struct HPoint {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;
};

/// Point (y, t) of the vertical plane {x = 0}.
struct WPoint {
  double y = 0.0;
  double t = 0.0;
};

/// Tangent vector in ambient coordinates. Because X and Y project onto the
/// standard (x, y) basis, a horizontal vector a·X + b·Y has ambient components
/// (a, b, ·): the frame coefficients are read off directly as (v.a, v.b).
struct HVector {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

inline HPoint group_mul(const HPoint& p, const HPoint& q) {
  return {p.x + q.x, p.y + q.y, p.t + q.t + 2.0 * (p.y * q.x - p.x * q.y)};
}

inline HPoint group_inverse(const HPoint& p) { return {-p.x, -p.y, -p.t}; }

/// Flow of the left-invariant field X = ∂x + 2y∂t.
inline HPoint flow_x(const HPoint& p, double s) {
  return {p.x + s, p.y, p.t + 2.0 * p.y * s};
}

/// Flow of the right-invariant field X^r = ∂x − 2y∂t.
inline HPoint flow_xr(const HPoint& p, double s) {
  return {p.x + s, p.y, p.t - 2.0 * p.y * s};
}

/// Projection onto {x = 0} along the integral lines of X.
inline WPoint project_left(const HPoint& p) { return {p.y, p.t - 2.0 * p.x * p.y}; }

/// Projection onto {x = 0} along the integral lines of X^r.
inline WPoint project_right(const HPoint& p) { return {p.y, p.t + 2.0 * p.x * p.y}; }

inline HVector frame_x(const HPoint& p) { return {1.0, 0.0, 2.0 * p.y}; }
inline HVector frame_y(const HPoint& p) { return {0.0, 1.0, -2.0 * p.x}; }

inline HVector operator-(const HPoint& p, const HPoint& q) {
  return {p.x - q.x, p.y - q.y, p.t - q.t};
}

/// Zero iff v lies in the horizontal plane at p, whose Cartesian equation is
/// c = 2·p.y·a − 2·p.x·b.
inline double horizontality_residual(const HPoint& p, const HVector& v) {
  return 2.0 * p.y * v.a - 2.0 * p.x * v.b - v.c;
}

/// Point of the left intrinsic graph over w with graph value u.
inline HPoint lift_left(const WPoint& w, double u) { return flow_x({0.0, w.y, w.t}, u); }

/// Point of the right intrinsic graph over w with graph value u.
inline HPoint lift_right(const WPoint& w, double u) { return flow_xr({0.0, w.y, w.t}, u); }

}  // namespace plateau
