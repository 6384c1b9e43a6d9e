#pragma once

#include <string>
#include <vector>

namespace plateau {

/// Real function on [0, t̄], either a polynomial Σ c_i t^i or a piecewise-linear
/// interpolant of sorted samples that cover both endpoints.
class ScalarFn1D {
 public:
  enum class Kind { Polynomial, PiecewiseLinear };

  ScalarFn1D() = default;

  static ScalarFn1D polynomial(std::vector<double> coeffs, double t_bar);
  static ScalarFn1D piecewise_linear(std::vector<double> ts, std::vector<double> values,
                                     double t_bar);
  static ScalarFn1D zero(double t_bar) { return polynomial({0.0}, t_bar); }

  Kind kind() const { return kind_; }
  double t_bar() const { return t_bar_; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  const std::vector<double>& sample_t() const { return ts_; }
  const std::vector<double>& sample_v() const { return vs_; }

  // Arguments slightly outside [0, t̄] (by at most 1e-12·max(1, t̄)) are
  // clamped; anything further throws DomainError.
  double operator()(double t) const;
  // One-sided (right) slope at piecewise-linear nodes, left slope at t̄.
  double derivative(double t) const;
  double second_derivative(double t) const;

  ScalarFn1D scaled(double k) const;
  bool is_zero() const;
  std::string describe() const;

 private:
  double clamp_arg(double t) const;
  std::size_t segment(double t) const;

  Kind kind_ = Kind::Polynomial;
  double t_bar_ = 1.0;
  std::vector<double> coeffs_{0.0};
  std::vector<double> ts_, vs_;
};

struct SupLip {
  double sup = 0.0;
  double lip = 0.0;
};

// Polynomials: max |f| and max secant slope over n_grid uniform nodes, refined
// at interior critical points of f and f' located between nodes, then the
// Lipschitz value is multiplied by `safety`. Piecewise-linear: exact.
SupLip sup_and_lip(const ScalarFn1D& f, int n_grid = 4097, double safety = 1.0);

}  // namespace plateau
