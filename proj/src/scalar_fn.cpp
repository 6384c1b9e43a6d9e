#include "plateau/scalar_fn.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "plateau/errors.hpp"
#include "plateau/numeric.hpp"

namespace plateau {

ScalarFn1D ScalarFn1D::polynomial(std::vector<double> coeffs, double t_bar) {
  if (!(t_bar > 0.0) || !std::isfinite(t_bar))
    throw PreconditionError(fmt::format("t_bar must be positive, got {}", t_bar));
  if (coeffs.empty()) coeffs.push_back(0.0);
  for (double c : coeffs)
    if (!std::isfinite(c)) throw PreconditionError("non-finite polynomial coefficient");
  while (coeffs.size() > 1 && coeffs.back() == 0.0) coeffs.pop_back();
  ScalarFn1D f;
  f.kind_ = Kind::Polynomial;
  f.t_bar_ = t_bar;
  f.coeffs_ = std::move(coeffs);
  return f;
}

ScalarFn1D ScalarFn1D::piecewise_linear(std::vector<double> ts, std::vector<double> values,
                                        double t_bar) {
  if (!(t_bar > 0.0) || !std::isfinite(t_bar))
    throw PreconditionError(fmt::format("t_bar must be positive, got {}", t_bar));
  if (ts.size() != values.size() || ts.size() < 2)
    throw PreconditionError("piecewise-linear function needs at least two (t, value) samples");
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!std::isfinite(ts[i]) || !std::isfinite(values[i]))
      throw PreconditionError(fmt::format("non-finite sample at index {}", i));
    if (i > 0 && !(ts[i] > ts[i - 1]))
      throw PreconditionError(fmt::format("sample abscissae not strictly increasing at index {}", i));
  }
  const double slack = 1e-12 * std::max(1.0, t_bar);
  if (std::abs(ts.front()) > slack || std::abs(ts.back() - t_bar) > slack)
    throw PreconditionError(
        fmt::format("samples must cover [0, {}], got [{}, {}]", t_bar, ts.front(), ts.back()));
  ts.front() = 0.0;
  ts.back() = t_bar;
  ScalarFn1D f;
  f.kind_ = Kind::PiecewiseLinear;
  f.t_bar_ = t_bar;
  f.coeffs_.clear();
  f.ts_ = std::move(ts);
  f.vs_ = std::move(values);
  return f;
}

double ScalarFn1D::clamp_arg(double t) const {
  if (t >= 0.0 && t <= t_bar_) return t;
  const double slack = 1e-12 * std::max(1.0, t_bar_);
  if (t < 0.0 && t >= -slack) return 0.0;
  if (t > t_bar_ && t <= t_bar_ + slack) return t_bar_;
  throw DomainError(fmt::format("argument {} outside [0, {}]", t, t_bar_));
}

std::size_t ScalarFn1D::segment(double t) const {
  auto it = std::upper_bound(ts_.begin(), ts_.end(), t);
  std::size_t k = static_cast<std::size_t>(it - ts_.begin());
  if (k == 0) return 0;
  return std::min(k - 1, ts_.size() - 2);
}

double ScalarFn1D::operator()(double t) const {
  t = clamp_arg(t);
  if (kind_ == Kind::Polynomial) {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * t + *it;
    return acc;
  }
  const std::size_t k = segment(t);
  if (t == ts_[k]) return vs_[k];
  if (t == ts_[k + 1]) return vs_[k + 1];
  const double w = (t - ts_[k]) / (ts_[k + 1] - ts_[k]);
  return (1.0 - w) * vs_[k] + w * vs_[k + 1];
}

double ScalarFn1D::derivative(double t) const {
  t = clamp_arg(t);
  if (kind_ == Kind::Polynomial) {
    double acc = 0.0;
    for (std::size_t i = coeffs_.size(); i-- > 1;) acc = acc * t + static_cast<double>(i) * coeffs_[i];
    return acc;
  }
  const std::size_t k = segment(t);
  return (vs_[k + 1] - vs_[k]) / (ts_[k + 1] - ts_[k]);
}

double ScalarFn1D::second_derivative(double t) const {
  t = clamp_arg(t);
  if (kind_ == Kind::PiecewiseLinear) return 0.0;
  double acc = 0.0;
  for (std::size_t i = coeffs_.size(); i-- > 2;)
    acc = acc * t + static_cast<double>(i * (i - 1)) * coeffs_[i];
  return acc;
}

ScalarFn1D ScalarFn1D::scaled(double k) const {
  ScalarFn1D f = *this;
  for (double& c : f.coeffs_) c *= k;
  for (double& v : f.vs_) v *= k;
  return f;
}

bool ScalarFn1D::is_zero() const {
  if (kind_ == Kind::Polynomial) return coeffs_.size() == 1 && coeffs_[0] == 0.0;
  return std::all_of(vs_.begin(), vs_.end(), [](double v) { return v == 0.0; });
}

std::string ScalarFn1D::describe() const {
  if (kind_ == Kind::Polynomial) return fmt::format("poly({:.17g})", fmt::join(coeffs_, ", "));
  return fmt::format("samples[{} nodes]", ts_.size());
}

namespace {

// Root of g in (a, b) when g changes sign there; NaN otherwise.
template <class G>
double sign_change_root(G&& g, double a, double b) {
  double ga = g(a), gb = g(b);
  if (ga == 0.0 || gb == 0.0 || (ga > 0.0) == (gb > 0.0)) return std::nan("");
  if (ga > 0.0) {
    auto neg = [&](double x) { return -g(x); };
    return bracketed_illinois(neg, a, b, -ga, -gb);
  }
  return bracketed_illinois(g, a, b, ga, gb);
}

}  // namespace

SupLip sup_and_lip(const ScalarFn1D& f, int n_grid, double safety) {
  SupLip out;
  if (f.kind() == ScalarFn1D::Kind::PiecewiseLinear) {
    const auto& ts = f.sample_t();
    const auto& vs = f.sample_v();
    for (std::size_t i = 0; i < ts.size(); ++i) {
      out.sup = std::max(out.sup, std::abs(vs[i]));
      if (i > 0) out.lip = std::max(out.lip, std::abs(vs[i] - vs[i - 1]) / (ts[i] - ts[i - 1]));
    }
    return out;
  }
  n_grid = std::max(n_grid, 2);
  const double tb = f.t_bar();
  const double h = tb / (n_grid - 1);
  auto node = [&](int i) { return i == n_grid - 1 ? tb : i * h; };
  double prev = f(0.0);
  out.sup = std::abs(prev);
  double dmax = std::abs(f.derivative(0.0));
  for (int i = 1; i < n_grid; ++i) {
    const double a = node(i - 1), b = node(i);
    const double fb = f(b);
    out.sup = std::max(out.sup, std::abs(fb));
    out.lip = std::max(out.lip, std::abs(fb - prev) / (b - a));
    dmax = std::max(dmax, std::abs(f.derivative(b)));
    prev = fb;
    // Extrema of f and of f' may fall strictly between nodes.
    const double c1 = sign_change_root([&](double x) { return f.derivative(x); }, a, b);
    if (!std::isnan(c1)) out.sup = std::max(out.sup, std::abs(f(c1)));
    const double c2 = sign_change_root([&](double x) { return f.second_derivative(x); }, a, b);
    if (!std::isnan(c2)) dmax = std::max(dmax, std::abs(f.derivative(c2)));
  }
  out.lip = std::max(out.lip, dmax) * safety;
  return out;
}

}  // namespace plateau
