#include "plateau/numeric.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace plateau {

double interpolate_uniform(std::span<const double> xs, std::span<const double> values, double x) {
  const std::size_t n = xs.size();
  if (n == 0) return 0.0;
  if (n == 1) return values[0];
  const double x0 = xs.front();
  const double dx = (xs.back() - x0) / static_cast<double>(n - 1);
  if (dx <= 0.0) return values[0];
  const double pos = (x - x0) / dx;
  if (n < 4) {
    const auto k = static_cast<std::size_t>(std::clamp(std::floor(pos), 0.0, static_cast<double>(n - 2)));
    const double w = (x - xs[k]) / (xs[k + 1] - xs[k]);
    return (1.0 - w) * values[k] + w * values[k + 1];
  }
  long k = static_cast<long>(std::floor(pos)) - 1;
  k = std::clamp(k, 0L, static_cast<long>(n) - 4);
  double result = 0.0;
  for (int a = 0; a < 4; ++a) {
    double w = 1.0;
    const double xa = xs[k + a];
    for (int b = 0; b < 4; ++b) {
      if (a == b) continue;
      const double xb = xs[k + b];
      w *= (x - xb) / (xa - xb);
    }
    result += w * values[k + a];
  }
  return result;
}

Stencil3 derivative_weights(double x0, double x1, double x2, double xe) {
  // Derivative of the quadratic Lagrange interpolant through the three points.
  const double d0 = (x0 - x1) * (x0 - x2);
  const double d1 = (x1 - x0) * (x1 - x2);
  const double d2 = (x2 - x0) * (x2 - x1);
  return {((xe - x1) + (xe - x2)) / d0, ((xe - x0) + (xe - x2)) / d1,
          ((xe - x0) + (xe - x1)) / d2};
}

double observed_order(double err_coarse, double err_fine, double spacing_ratio) {
  if (!(err_coarse > 0.0) || !(err_fine > 0.0)) return std::numeric_limits<double>::infinity();
  return std::log(err_coarse / err_fine) / std::log(spacing_ratio);
}

double fit_slope(std::span<const double> xs, std::span<const double> ys) {
  const std::size_t n = std::min(xs.size(), ys.size());
  if (n < 2) return 0.0;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

namespace {
std::atomic<unsigned> g_workers{0};
}

void set_worker_count(unsigned n) { g_workers.store(n); }

unsigned worker_count() {
  const unsigned n = g_workers.load();
  if (n != 0) return n;
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  std::size_t first_error_index = n;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(err_mutex);
        if (i < first_error_index) {
          first_error_index = i;
          first_error = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace plateau
