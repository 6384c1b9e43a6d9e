#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "plateau/errors.hpp"
#include "plateau/ruling.hpp"

using namespace plateau;

TEST_CASE("interpolation equation") {
  const auto flat = oracle::problem_for(0.0);
  const auto c1 = oracle::problem_for(0.003);
  for (double s : {0.0, 0.3, 1.7})
    for (double l : {0.0, 0.9, 2.0}) CHECK(q_phi(s, l, flat.domain, flat.datum) == l - s);
  CHECK(q_phi(1, 1, c1.domain, c1.datum) == doctest::Approx(0.003).epsilon(1e-15));
  CHECK(q_phi(0, 0, c1.domain, c1.datum) == 0.0);
  const auto k = oracle::c1();
  std::mt19937_64 g(2);
  for (int i = 0; i < 100; ++i) {
    const double s = 2.0 * static_cast<double>(g() >> 11) * 0x1.0p-53;
    const double l = 2.0 * static_cast<double>(g() >> 11) * 0x1.0p-53;
    CHECK(q_phi(s, l, c1.domain, c1.datum) == doctest::Approx(oracle::q(k, s, l)).epsilon(1e-13));
  }
}

TEST_CASE("ruling map against bisection") {
  const RulingSolver flat(oracle::problem_for(0.0));
  for (double s : {0.1, 0.5, 1.0, 1.99}) CHECK(std::abs(flat.lambda_at(s) - s) <= 1e-15);
  const RulingSolver S(oracle::problem_for(0.003));
  const auto k = oracle::c1();
  CHECK(S.lambda_at(0.0) == 0.0);
  CHECK(S.lambda_at(2.0) == 2.0);
  CHECK(S.lambda_at(1.0) == doctest::Approx(0.99700).epsilon(1e-5));
  for (int i = 1; i < 40; ++i) {
    const double s = 2.0 * i / 40.0;
    const double lam = S.lambda_at(s);
    CHECK(std::abs(lam - oracle::lambda(k, s)) <= 1e-12);
    CHECK(std::abs(S.lambda_inverse(lam) - s) <= 1e-12);
  }
  // λ' against a centred difference of the oracle
  for (double s : {0.2, 1.0, 1.8}) {
    const double d = (oracle::lambda(k, s + 1e-5) - oracle::lambda(k, s - 1e-5)) / 2e-5;
    CHECK(S.lambda_slope(s, S.lambda_at(s)) == doctest::Approx(d).epsilon(1e-8));
  }
}

TEST_CASE("ruling solver refuses a closed interpolation gate") {
  CHECK_THROWS_AS(RulingSolver(oracle::problem_for(0.4)), GateError);
  try {
    RulingSolver bad(oracle::problem_for(0.4));
  } catch (const GateError& e) {
    CHECK(e.gate() == "interp");
  }
}

TEST_CASE("lambda map certificate") {
  const RulingSolver flat(oracle::problem_for(0.0));
  const auto m0 = build_lambda_map(flat, 65);
  CHECK((m0.lip_lo == 1.0 && m0.lip_hi == 1.0));
  CHECK(m0.certified);

  const RulingSolver S(oracle::problem_for(0.003));
  const auto m = build_lambda_map(S, 257);
  CHECK(m.bound_lo == doctest::Approx(0.94742).epsilon(1e-5));
  CHECK(m.bound_hi == doctest::Approx(1.05550).epsilon(1e-5));
  CHECK(m.certified);
  CHECK(m.lip_lo >= 0.947);
  CHECK(m.lip_hi <= 1.056);
  CHECK(m.inv_lip_lo >= m.bound_lo - m.eps_grid);
  CHECK(m.inv_lip_hi <= m.bound_hi + m.eps_grid);
  CHECK(m.residual_max <= 1e-11);
  CHECK(m.values.front() == 0.0);
  CHECK(m.values.back() == 2.0);
  for (std::size_t i = 1; i < m.values.size(); ++i) CHECK(m.values[i] > m.values[i - 1]);

  // beyond the left gate the map still exists and is judged by its own ζ
  const RulingSolver Z(oracle::problem_for(0.05));
  const auto mz = build_lambda_map(Z, 129);
  CHECK(mz.zeta == doctest::Approx(0.45).epsilon(1e-12));
  CHECK(mz.bound_lo == doctest::Approx(0.55 / 1.45).epsilon(1e-12));
  CHECK(mz.certified);
}

TEST_CASE("lambda is the unique zero of Q for each s") {
  const RulingSolver S(oracle::problem_for(0.003));
  std::mt19937_64 g(99);
  for (int k = 0; k < 32; ++k) {
    const double s = 2.0 * static_cast<double>(g() >> 11) * 0x1.0p-53;
    int changes = 0;
    double prev = S.q(s, 0.0);
    for (int j = 1; j <= 2000; ++j) {
      const double v = S.q(s, j * 1e-3);
      if (v != 0.0 && prev != 0.0 && (v > 0) != (prev > 0)) ++changes;
      if (v != 0.0) prev = v;
    }
    CHECK(changes <= 1);
  }
}

TEST_CASE("boundary lifts and ruling direction") {
  const RulingSolver S(oracle::problem_for(0.003));
  auto p = S.lift_p1(1.0);
  CHECK(p.x == doctest::Approx(0.003).epsilon(1e-15));
  CHECK(p.y == -0.25);
  CHECK(p.t == doctest::Approx(0.9985).epsilon(1e-15));
  CHECK(S.lift_p1(0.0).x == 0.0);
  CHECK(S.lift_p2(0.0).t == 0.0);

  const RulingSolver F(oracle::problem_for(0.0));
  auto d = F.direction(1.0);
  CHECK((d.alpha_bar == 0.0 && d.beta_bar == 0.5));
  CHECK(F.lift_p1(0.7).x == 0.0);
  CHECK(F.lift_p1(0.7).t == 0.7);

  d = S.direction(1.0);
  CHECK(d.alpha_bar == doctest::Approx(-0.003).epsilon(1e-13));
  CHECK(d.beta_bar == doctest::Approx(0.49999).epsilon(1e-5));
  CHECK_THROWS_AS(S.direction(0.0), PreconditionError);
  CHECK_THROWS_AS(S.direction(2.0), PreconditionError);
  const auto near = S.direction(1e-9);
  CHECK(std::abs(near.alpha_bar) < 1e-10);
  CHECK(near.beta_bar < 1e-9);
}

TEST_CASE("rulings interpolate the boundary lifts") {
  const RulingSolver S(oracle::problem_for(0.003));
  const auto k = oracle::c1();
  const double l = S.lambda_at(1.0);
  const auto a = S.rho(0.0, 1.0), b = S.rho(1.0, 1.0), m = S.rho(0.5, 1.0);
  CHECK(a.t == S.lift_p1(1.0).t);
  CHECK(b.t == S.lift_p2(l).t);
  CHECK(m.x == doctest::Approx(0.5 * (a.x + b.x)).epsilon(1e-15));
  CHECK(m.t == doctest::Approx(0.5 * (a.t + b.t)).epsilon(1e-15));
  for (double h : {0.1, 0.6}) {
    const auto o = oracle::rho(k, h, 0.4);
    const auto r = S.rho(h, 0.4);
    CHECK(std::abs(r.x - o.x) + std::abs(r.y - o.y) + std::abs(r.t - o.t) <= 1e-12);
  }
  const RulingSolver F(oracle::problem_for(0.0));
  const auto f = F.rho(0.25, 1.2);
  CHECK(f.x == 0.0);
  CHECK(f.y == doctest::Approx(0.75 * (-0.24) + 0.25 * 0.24).epsilon(1e-15));
  CHECK(f.t == doctest::Approx(1.2).epsilon(1e-15));
}

TEST_CASE("ruled surface is horizontal along rulings and bounded by the lifts") {
  const RulingSolver S(oracle::problem_for(0.003));
  const auto R = build_ruled_surface(S, 257, 5);
  CHECK(R.horizontality_max <= 10 * S.tol());
  CHECK(R.boundary_lift_deviation <= 1e-12);
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < R.n_s(); ++i) {
    const auto dir = R.p2[i] - R.p1[i];
    for (std::size_t j = 0; j < R.n_h(); ++j) worst = std::max(worst, std::abs(horizontality_residual(R.at(i, j), dir)));
  }
  CHECK(worst <= 10 * S.tol());
  // tangents: ∂ρ/∂h horizontal, ∂ρ/∂s against finite differences
  const double l = S.lambda_at(0.8);
  const auto tg = S.tangents(0.3, 0.8, l);
  CHECK(std::abs(horizontality_residual(S.rho(0.3, 0.8), tg.d_h)) <= 1e-14);
  const auto fp = S.rho(0.3, 0.8 + 1e-6), fm = S.rho(0.3, 0.8 - 1e-6);
  CHECK(tg.d_s.c == doctest::Approx((fp.t - fm.t) / 2e-6).epsilon(1e-7));
  CHECK(tg.d_s.a == doctest::Approx((fp.x - fm.x) / 2e-6).epsilon(1e-6));
}
