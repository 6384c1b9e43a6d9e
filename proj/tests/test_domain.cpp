#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "plateau/domain.hpp"
#include "plateau/errors.hpp"
#include "plateau/scalar_fn.hpp"

using namespace plateau;

namespace {
ScalarFn1D poly(std::vector<double> c) { return ScalarFn1D::polynomial(std::move(c), 2.0); }
ScalarFn1D pl(std::vector<double> t, std::vector<double> v) { return ScalarFn1D::piecewise_linear(t, v, 2.0); }
}  // namespace

TEST_CASE("scalar function evaluation") {
  CHECK(poly({0, 0.5, -0.25})(2.0) == 0.0);
  CHECK(poly({0, 0.5, -0.25})(1.0) == 0.25);
  const auto f = pl({0, 1, 2}, {0, 1, 0});
  CHECK(f(0.5) == 0.5);
  CHECK(f(1.5) == 0.5);
  const auto g = pl({0, 0.3, 1.1, 2}, {0.1, -0.7, 2.5, 3.0});
  CHECK(g(0.0) == 0.1);
  CHECK(g(0.3) == -0.7);
  CHECK(g(1.1) == 2.5);
  CHECK(g(2.0) == 3.0);
  CHECK(poly({1, 2, 3}).derivative(1.0) == 8.0);
  CHECK(poly({1, 2, 3}).second_derivative(0.4) == 6.0);
  CHECK(poly({0, 1, 0, 0}).coeffs().size() == 2);
}

TEST_CASE("scalar function domain") {
  const auto f = poly({0, 1});
  CHECK(f(2.0 + 1e-13) == 2.0);
  CHECK(f(-1e-13) == 0.0);
  CHECK_THROWS_AS(f(2.1), DomainError);
  CHECK_THROWS_AS(f(-0.01), DomainError);
  CHECK_THROWS_AS(pl({0, 1, 1, 2}, {0, 0, 0, 0}), PreconditionError);
  CHECK_THROWS_AS(pl({0.1, 2}, {0, 0}), PreconditionError);
}

TEST_CASE("sup and Lipschitz constant") {
  auto z = sup_and_lip(ScalarFn1D::zero(2.0));
  CHECK((z.sup == 0.0 && z.lip == 0.0));
  auto q = sup_and_lip(poly({0, 0.5, -0.25}));
  CHECK(q.sup == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(q.lip == doctest::Approx(0.5).epsilon(1e-14));
  auto p = sup_and_lip(pl({0, 1, 2}, {0, 3, 0}));
  CHECK((p.sup == 3.0 && p.lip == 3.0));
  // a maximum strictly between grid nodes is still found
  auto c = sup_and_lip(ScalarFn1D::polynomial({0, 0, 0, 1, -1}, 1.0), 7);
  CHECK(c.sup == doctest::Approx(27.0 / 256.0).epsilon(1e-14));
}

TEST_CASE("sup and Lipschitz constant are exact on piecewise-linear data") {
  std::mt19937_64 g(21);
  for (int k = 0; k < 50; ++k) {
    std::vector<double> t{0.0}, v{static_cast<double>(g() % 1000) / 100.0 - 5.0};
    while (t.back() < 2.0) {
      t.push_back(std::min(2.0, t.back() + 0.01 + static_cast<double>(g() % 100) / 300.0));
      v.push_back(static_cast<double>(g() % 1000) / 100.0 - 5.0);
    }
    double sup = 0.0, lip = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      sup = std::max(sup, std::abs(v[i]));
      if (i) lip = std::max(lip, std::abs(v[i] - v[i - 1]) / (t[i] - t[i - 1]));
    }
    const auto r = sup_and_lip(pl(t, v));
    CHECK(r.sup == sup);
    CHECK(r.lip == doctest::Approx(lip).epsilon(1e-15));
  }
}

TEST_CASE("lens slices") {
  const LenticularDomain D(poly({0, -0.5, 0.25}), poly({0, 0.5, -0.25}));
  CHECK(D.y_min() == doctest::Approx(-0.25).epsilon(1e-15));
  CHECK(D.y_max() == doctest::Approx(0.25).epsilon(1e-15));
  auto s = D.slice(-0.125);
  CHECK(s.t_lo == doctest::Approx(1 - std::sqrt(0.5)).epsilon(1e-14));
  CHECK(s.t_hi == doctest::Approx(1 + std::sqrt(0.5)).epsilon(1e-14));
  s = D.slice(0.0);
  CHECK((s.t_lo == 0.0 && s.t_hi == 2.0 && !s.empty));
  s = D.slice(-0.25);
  CHECK((s.empty && s.at_extremum));
  CHECK(D.slice(0.3).empty);
  for (double y : {-0.2, -0.01, 0.05, 0.24}) {
    const auto sl = D.slice(y);
    const double half = std::sqrt(1.0 - std::abs(y) / 0.25);
    CHECK(sl.t_lo == doctest::Approx(1 - half).epsilon(1e-13));
    CHECK(sl.t_hi == doctest::Approx(1 + half).epsilon(1e-13));
  }
  CHECK(D.contains({0.0, 1.0}));
  CHECK_FALSE(D.contains({0.25, 0.5}));
}

TEST_CASE("thresholds are the positive roots of their quadratics") {
  const double l = threshold_left(), r = threshold_right();
  CHECK(threshold_interp() == 1.0);
  CHECK(std::abs(2 * l * l + 11 * l - 1) <= 1e-15);
  CHECK(std::abs(24 * r * r + 25 * r - 1) <= 1e-15);
  CHECK(l == doctest::Approx(0.0894541729).epsilon(1e-9));
  CHECK(r == doctest::Approx(0.0385717326).epsilon(1e-9));
  CHECK(gate_table().size() == 3);
  CHECK(gate_table()[1].closed_form == "zeta < (sqrt(129)-11)/4");
  CHECK(gate_table()[2].closed_form == "zeta < (sqrt(721)-25)/48");
}

TEST_CASE("zeta of the symmetric lens cases") {
  auto z = oracle::problem_for(0.0).zeta;
  CHECK(z.zeta == 0.0);
  CHECK((z.gate_interp && z.gate_left && z.gate_right));
  z = oracle::problem_for(0.003).zeta;
  CHECK(z.zeta == doctest::Approx(4 * (0.25 + 0.5) * (0.003 + 0.006)).epsilon(1e-13));
  CHECK((z.gate_interp && z.gate_left && z.gate_right));
  z = oracle::problem_for(0.05).zeta;
  CHECK(z.zeta == doctest::Approx(0.45).epsilon(1e-13));
  CHECK(z.gate_interp);
  CHECK_FALSE(z.gate_left);
  CHECK_FALSE(z.gate_right);
}

TEST_CASE("zeta scales linearly with the datum and gates nest") {
  const LenticularDomain D(poly({0, -0.5, 0.25}), poly({0, 0.5, -0.25}));
  const BoundaryDatum phi{poly({0, 0.02, -0.01}), poly({0.0, 0.013, -0.0065})};
  const auto base = zeta_report(D, phi);
  for (double k : {0.0, 0.1, 0.5, 1.7, 3.0, 25.0}) {
    const auto z = zeta_report(D, {phi.phi1.scaled(k), phi.phi2.scaled(k)});
    CHECK(z.phi_sup + z.phi_lip == doctest::Approx(k * (base.phi_sup + base.phi_lip)).epsilon(1e-14));
    CHECK(z.zeta == doctest::Approx(k * base.zeta).epsilon(1e-14));
    CHECK((!z.gate_right || z.gate_left));
    CHECK((!z.gate_left || z.gate_interp));
  }
}

TEST_CASE("validation of lens data") {
  const auto c1 = oracle::problem_for(0.003);
  CHECK(validate(c1.domain, c1.datum).ok());

  // upper curve that does not come back down to 0 at t̄
  const auto g2 = pl({0, 0.5, 1.0, 1.5, 2.0}, {0, 0.18, 0.25, 0.2, 0.1});
  auto rep = validate(LenticularDomain(g2.scaled(-1.0), g2), {ScalarFn1D::zero(2), ScalarFn1D::zero(2)});
  CHECK_FALSE(rep.check("pinch gamma(0) = gamma(t_bar) = 0").passed);
  CHECK(rep.check("pinch gamma(0) = gamma(t_bar) = 0").worst_t == 2.0);

  // slopes -1, 1.6, 0.4: the slope drops after t = 1.5, so not convex
  const auto g1 = pl({0, 1, 1.5, 2}, {0, -1, -0.2, 0});
  rep = validate(LenticularDomain(g1, poly({0, 0.5, -0.25})), {ScalarFn1D::zero(2), ScalarFn1D::zero(2)});
  CHECK_FALSE(rep.check("gamma1 convex").passed);
  CHECK(rep.check("gamma2 concave").passed);

  // datum that disagrees with itself at the pinch
  rep = validate(c1.domain, {poly({0.1}), poly({0.0})});
  CHECK_FALSE(rep.check("phi corner compatibility").passed);
  CHECK_THROWS_AS(zeta_report(c1.domain, {poly({0.1}), poly({0.0})}), ValidationError);
}
