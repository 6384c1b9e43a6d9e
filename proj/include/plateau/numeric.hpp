#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>

namespace plateau {

/// Neumaier-compensated accumulator. Summation order is the caller's.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

namespace detail {
inline bool bracket_collapsed(double lo, double hi) {
  const double scale = std::max({std::abs(lo), std::abs(hi), std::numeric_limits<double>::min()});
  return hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * scale;
}
}  // namespace detail

/// Root of an increasing function on [lo, hi] with f(lo) <= 0 <= f(hi).
/// Newton steps from x0, rejected whenever they leave the current bracket;
/// bisection otherwise. Runs to full double precision.
template <class F, class DF>
double bracketed_newton(F&& f, DF&& df, double lo, double hi, double x0, int max_iter = 200) {
  double x = std::clamp(x0, lo, hi);
  double prev_width = hi - lo;
  int since_check = 0;
  bool force_bisect = false;
  for (int it = 0; it < max_iter; ++it) {
    const double fx = f(x);
    if (fx == 0.0) return x;
    if (fx < 0.0)
      lo = x;
    else
      hi = x;
    if (detail::bracket_collapsed(lo, hi)) break;
    if (++since_check == 3) {
      force_bisect = (hi - lo) > 0.5 * prev_width;
      prev_width = hi - lo;
      since_check = 0;
    }
    double next = std::numeric_limits<double>::quiet_NaN();
    if (!force_bisect) {
      const double d = df(x);
      if (d > 0.0 && std::isfinite(d)) next = x - fx / d;
    }
    force_bisect = false;
    if (!(next > lo && next < hi)) next = lo + 0.5 * (hi - lo);
    if (std::abs(next - x) <= 2.0 * std::numeric_limits<double>::epsilon() * std::abs(x)) {
      return x;
    }
    x = next;
  }
  return std::abs(f(lo)) <= std::abs(f(hi)) ? lo : hi;
}

/// Root of an increasing function on [lo, hi] given f(lo) <= 0 <= f(hi),
/// by Illinois-modified regula falsi with periodic bisection. Full precision.
template <class F>
double bracketed_illinois(F&& f, double lo, double hi, double flo, double fhi, int max_iter = 300) {
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  double true_flo = flo;
  double true_fhi = fhi;
  int side = 0;
  double prev_width = hi - lo;
  int since_check = 0;
  bool force_bisect = false;
  for (int it = 0; it < max_iter; ++it) {
    if (detail::bracket_collapsed(lo, hi)) break;
    double x = force_bisect ? lo + 0.5 * (hi - lo) : (lo * fhi - hi * flo) / (fhi - flo);
    force_bisect = false;
    if (!(x > lo && x < hi)) x = lo + 0.5 * (hi - lo);
    if (!(x > lo && x < hi)) break;
    const double fx = f(x);
    if (fx == 0.0) return x;
    if (fx < 0.0) {
      lo = x;
      flo = true_flo = fx;
      if (side == -1) fhi *= 0.5;
      side = -1;
    } else {
      hi = x;
      fhi = true_fhi = fx;
      if (side == +1) flo *= 0.5;
      side = +1;
    }
    if (++since_check == 4) {
      force_bisect = (hi - lo) > 0.5 * prev_width;
      prev_width = hi - lo;
      since_check = 0;
    }
  }
  return std::abs(true_flo) <= std::abs(true_fhi) ? lo : hi;
}

/// Cubic (or lower, for short rows) Lagrange interpolation of values sampled
/// at uniformly spaced abscissae xs.
double interpolate_uniform(std::span<const double> xs, std::span<const double> values, double x);

/// Three-point derivative weights on a non-uniform stencil x0 < x1 < x2,
/// evaluated at x_eval (one of the stencil points).
struct Stencil3 {
  double w0, w1, w2;
};
Stencil3 derivative_weights(double x0, double x1, double x2, double x_eval);

/// Observed convergence order between two errors on grids with spacing ratio
/// h_coarse / h_fine.
double observed_order(double err_coarse, double err_fine, double spacing_ratio);

/// Least-squares slope of ys against xs.
double fit_slope(std::span<const double> xs, std::span<const double> ys);

/// Number of worker threads used by parallel_for (0 = hardware concurrency).
void set_worker_count(unsigned n);
unsigned worker_count();

/// Runs fn(i) for i in [0, n) across worker threads. Each index is processed
/// exactly once; results must be stored by index. If several indices throw,
/// the exception of the lowest index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace plateau
