#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "plateau/errors.hpp"
#include "plateau/graph.hpp"
#include "plateau/numeric.hpp"

using namespace plateau;

namespace {
GraphInverter inverter(double c) { return GraphInverter(RulingSolver(oracle::problem_for(c))); }
}  // namespace

TEST_CASE("ruling height fraction") {
  const auto F = inverter(0.0);
  for (double s : {0.2, 1.0, 1.7}) CHECK(F.h_y(s, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
  const double g1 = -0.25 * 0.6 * 1.4;
  CHECK(F.h_y(0.6, g1 + 1e-9) > 0.0);
  CHECK(F.h_y(0.6, g1 + 1e-9) < 1e-8);

  const auto G = inverter(0.003);
  const auto k = oracle::c1();
  CHECK(G.h_y(1.0, 0.1) == doctest::Approx(0.70001).epsilon(1e-5));
  CHECK(G.h_y(1.0, 0.1) == doctest::Approx(oracle::crossing(k, 1.0, 0.1).h).epsilon(1e-13));
  CHECK_THROWS_AS(G.h_y(0.1, 0.2), PreconditionError);
}

TEST_CASE("ruling intervals of a row") {
  const auto F = inverter(0.0);
  auto J = F.interval_J(-0.125);
  CHECK(J.s_lo == doctest::Approx(1 - std::sqrt(0.5)).epsilon(1e-14));
  CHECK(J.s_hi == doctest::Approx(1 + std::sqrt(0.5)).epsilon(1e-14));
  J = F.interval_J(0.0);
  CHECK((J.s_lo == 0.0 && J.s_hi == 2.0));
  J = F.interval_J(-0.25);
  CHECK((J.empty && J.at_extremum));

  const auto G = inverter(0.003);
  const auto k = oracle::c1();
  for (double y : {-0.2, -0.05, 0.05, 0.2}) {
    J = G.interval_J(y);
    const auto [lo, hi] = oracle::ruling_range(k, y);
    CHECK(J.s_lo == doctest::Approx(lo).epsilon(1e-12));
    CHECK(J.s_hi == doctest::Approx(hi).epsilon(1e-12));
    CHECK(G.tau(J.s_lo, y) == doctest::Approx(J.t_lo).epsilon(1e-12));
    CHECK(G.tau(J.s_hi, y) == doctest::Approx(J.t_hi).epsilon(1e-12));
  }
}

TEST_CASE("projected ruling crossings") {
  const auto F = inverter(0.0);
  for (double s : {0.4, 1.1}) CHECK(F.tau(s, 0.03) == doctest::Approx(s).epsilon(1e-15));
  const auto G = inverter(0.003);
  const auto k = oracle::c1();
  // on the lower arc a ruling starts at its own parameter
  const auto J = G.interval_J(-0.1);
  CHECK(G.tau(J.s_lo, -0.1) == doctest::Approx(J.s_lo).epsilon(1e-14));
  CHECK(G.tau(J.s_hi, -0.1) == doctest::Approx(J.s_hi).epsilon(1e-14));
  for (double y : {-0.1, 0.0, 0.1}) {
    const auto o = oracle::crossing(k, 1.0, y);
    CHECK(G.tau(1.0, y) == doctest::Approx(o.tau).epsilon(1e-13));
    CHECK(G.tau_right(1.0, y) == doctest::Approx(o.tau_right).epsilon(1e-13));
  }
  CHECK(G.tau(1.0, 0.1) == doctest::Approx(0.997270006614970).epsilon(1e-12));
}

TEST_CASE("left inversion") {
  const auto F = inverter(0.0);
  for (double y : {-0.2, 0.0, 0.1})
    for (double t : {0.9, 1.0, 1.2}) CHECK(F.invert_left(y, t).u == 0.0);

  const auto G = inverter(0.003);
  const auto k = oracle::c1();
  const auto c = G.invert_left(0.0, 1.0);
  CHECK(c.u == doctest::Approx(oracle::u_left(k, 0.0, 1.0)).epsilon(1e-12));
  CHECK(std::abs(c.u - oracle::u_left_nearest(k, 0.0, 1.0, 2049)) <= 1e-7);
  CHECK(c.u == doctest::Approx(0.00149999578131644).epsilon(1e-12));
  for (double y : {-0.2, -0.07, 0.04, 0.19})
    for (double f : {0.1, 0.5, 0.93}) {
      const auto sl = G.interval_J(y);
      const double t = sl.t_lo + f * (sl.t_hi - sl.t_lo);
      CHECK(std::abs(G.invert_left(y, t).u - oracle::u_left(k, y, t)) <= 1e-13);
    }
  // slice ends carry the datum
  auto J = G.interval_J(-0.125);
  CHECK(G.invert_left(-0.125, J.t_lo).u == doctest::Approx(0.003 * J.t_lo * (2 - J.t_lo)).epsilon(1e-13));
  J = G.interval_J(0.125);
  CHECK(std::abs(G.invert_left(0.125, J.t_hi).u) <= 1e-15);
  CHECK_THROWS_AS(G.invert_left(0.0, 2.5), DomainError);
  CHECK_THROWS_AS(G.invert_left(0.3, 1.0), DomainError);
}

TEST_CASE("inversion refuses closed gates") {
  const auto Z = inverter(0.05);
  try {
    Z.invert_left(0.0, 1.0);
    FAIL("left gate did not close");
  } catch (const GateError& e) {
    CHECK(e.gate() == "left");
  }
  CHECK_THROWS_AS(left_graph(Z, {33, 33}), GateError);
  // between the two thresholds the left graph exists but the right one does not
  const auto M = inverter(0.02);
  CHECK(M.solver().zeta() == doctest::Approx(0.18).epsilon(1e-12));
  CHECK_THROWS_AS(M.invert_right(0.0, 1.0), GateError);
}

TEST_CASE("row layout integrates low-degree polynomials exactly") {
  for (int n : {9, 33, 129, 257}) {
    const auto L = row_layout(-0.3, 0.2, n);
    CHECK(std::count(L.y.begin(), L.y.end(), 0.0) == 1);
    CompensatedSum w, wy;
    for (std::size_t i = 0; i < L.y.size(); ++i) {
      CHECK(L.y[i] > -0.3);
      CHECK(L.y[i] < 0.2);
      if (i) CHECK(L.y[i] > L.y[i - 1]);
      w.add(L.weight[i]);
      wy.add(L.weight[i] * L.y[i]);
    }
    CHECK(w.value() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(wy.value() == doctest::Approx((0.04 - 0.09) / 2).epsilon(1e-13));
  }
}

TEST_CASE("left graph of the flat and small data") {
  const auto F = inverter(0.0);
  const auto u0 = left_graph(F, {65, 65});
  for (const auto& r : u0.rows)
    for (double v : r.u) CHECK(v == 0.0);
  CHECK(u0.boundary_residual == 0.0);

  const auto G = inverter(0.003);
  const auto k = oracle::c1();
  const auto u = left_graph(G, {129, 129});
  CHECK(u.boundary_residual <= 1e-10);
  double worst = 0.0;
  for (std::size_t i = 0; i < u.rows.size(); i += 17)
    for (std::size_t j = 0; j < u.rows[i].t.size(); j += 13)
      worst = std::max(worst, std::abs(u.rows[i].u[j] - oracle::u_left(k, u.rows[i].y, u.rows[i].t[j])));
  CHECK(worst <= 1e-12);
  const auto u2 = left_graph(G, {257, 257});
  CHECK(u.lip_estimate > 0.0);
  CHECK(std::abs(u2.lip_estimate / u.lip_estimate - 1.0) <= 0.1);
}

TEST_CASE("left graph does not depend on the worker count") {
  const auto G = inverter(0.003);
  set_worker_count(1);
  const auto a = left_graph(G, {65, 65});
  set_worker_count(3);
  const auto b = left_graph(G, {65, 65});
  set_worker_count(0);
  CHECK(a.values() == b.values());
}

TEST_CASE("beta curves") {
  const auto F = inverter(0.0);
  const auto u0 = left_graph(F, {33, 33});
  const auto c0 = beta_monotonicity(u0);
  CHECK(c0.min_slope == doctest::Approx(1.0).epsilon(1e-14));
  const auto G = inverter(0.003);
  const auto u = left_graph(G, {129, 129});
  const auto bc = beta_monotonicity(u);
  for (std::size_t i = 0; i < u.rows.size(); ++i) {
    const auto& r = u.rows[i];
    if (r.y == 0.0) {
      const auto b = beta_curve(u, i);
      for (double t : r.t) CHECK(b(t) == t);
    }
    double lip_t = 0.0;
    for (std::size_t j = 1; j < r.t.size(); ++j) lip_t = std::max(lip_t, std::abs(r.u[j] - r.u[j - 1]) / (r.t[j] - r.t[j - 1]));
    CHECK(bc.per_row[i] >= 1.0 - 4.0 * std::abs(r.y) * lip_t - 1e-12);
    CHECK(bc.per_row[i] > 0.0);
  }
}

TEST_CASE("right domain and right graph") {
  const auto F = inverter(0.0);
  const auto u0 = left_graph(F, {65, 65});
  const auto t0 = right_domain(F, u0);
  for (std::size_t i = 0; i < t0.y.size(); ++i) {
    CHECK(t0.tau_lo[i] == u0.rows[i].t_lo);
    CHECK(t0.tau_hi[i] == u0.rows[i].t_hi);
  }
  const auto ur0 = right_graph(F, t0, 65);
  for (const auto& r : ur0.rows)
    for (double v : r.u) CHECK(v == 0.0);

  const auto G = inverter(0.003);
  const auto k = oracle::c1();
  const auto u = left_graph(G, {129, 129});
  const auto tb = right_domain(G, u);
  for (std::size_t i = 0; i < tb.y.size(); ++i) {
    const auto& r = u.rows[i];
    if (r.y == 0.0) {
      CHECK(tb.tau_lo[i] == r.t_lo);
      CHECK(tb.tau_hi[i] == r.t_hi);
    }
    CHECK(std::abs(tb.tau_lo[i] - r.t_lo) <= 4 * std::abs(r.y) * 0.003 + 1e-15);
    CHECK(std::abs(tb.tau_hi[i] - r.t_hi) <= 4 * std::abs(r.y) * 0.003 + 1e-15);
  }
  const auto c = G.invert_right(0.0, 1.0);
  CHECK(c.u == doctest::Approx(oracle::u_right(k, 0.0, 1.0)).epsilon(1e-12));
  CHECK(G.invert_right(0.1, 1.2).u == doctest::Approx(oracle::u_right(k, 0.1, 1.2)).epsilon(1e-11));
  const auto ur = right_graph(G, tb, 129);
  CHECK(ur.boundary_residual <= 1e-9);

  const auto rt = round_trip_deviation(G, u);
  CHECK(rt.samples > 1000);
  CHECK(rt.max_deviation <= 1e-9);
}

TEST_CASE("injectivity and slope certificates") {
  const auto G = inverter(0.003);
  const auto inj = injectivity_witness(G, 65, 17);
  CHECK(inj.samples > 500);
  CHECK(inj.max_parameter_deviation <= 1e-9);
  const auto ts = tau_slopes(G, {-0.24, -0.1, 0.0, 0.1, 0.24}, 257);
  CHECK(ts.left_bound > 0.0);
  CHECK(ts.min_left_slope >= ts.left_bound);
  CHECK(ts.min_right_slope >= ts.right_bound);
  CHECK(ts.right_bound < ts.left_bound);
}

TEST_CASE("finite differences on the row grid") {
  const auto F = inverter(0.0);
  const auto g = left_graph(F, {33, 33});
  NodeField lin = g.values(), quad = g.values();
  for (std::size_t i = 0; i < g.rows.size(); ++i)
    for (std::size_t j = 0; j < g.rows[i].t.size(); ++j) {
      const double y = g.rows[i].y, t = g.rows[i].t[j];
      lin[i][j] = 3 * y - 2 * t + 1;
      quad[i][j] = t * t - y * t;
    }
  const auto dt = fd_dt(g, quad);
  const auto dy = fd_dy(g, lin);
  double e_t = 0.0, e_y = 0.0;
  for (std::size_t i = 0; i < g.rows.size(); ++i)
    for (std::size_t j = 0; j < g.rows[i].t.size(); ++j) {
      e_t = std::max(e_t, std::abs(dt[i][j] - (2 * g.rows[i].t[j] - g.rows[i].y)));
      e_y = std::max(e_y, std::abs(dy[i][j] - 3.0));
    }
  CHECK(e_t <= 1e-11);
  CHECK(e_y <= 1e-9);
  const auto v = interpolate_field(g, lin, 0.013, 1.1);
  REQUIRE(v.has_value());
  CHECK(*v == doctest::Approx(3 * 0.013 - 2.2 + 1).epsilon(1e-12));
  CHECK_FALSE(interpolate_field(g, lin, 0.26, 1.0).has_value());
}
