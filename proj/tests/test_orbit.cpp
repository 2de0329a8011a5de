#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "scars/orbit.hpp"

#include <cmath>

using namespace scars;

namespace {
constexpr double kTwoPi = 2.0 * M_PI;
}

TEST_CASE("integrator: constant and smooth right-hand sides") {
  const FlowRhs constant = [](const AnglePoint&) {
    Velocity v;
    v.d_theta_e = 0.3;
    v.d_theta_o = -0.2;
    return v;
  };
  Trajectory tr = integrate(constant, AnglePoint{0.1, 0.2, 0, 0}, 5.0, 1e-12);
  REQUIRE(!tr.aborted);
  REQUIRE(!tr.samples.empty());
  const auto& last = tr.samples.back();
  CHECK(last.t == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(last.p.theta_e == doctest::Approx(0.1 + 0.3 * 5.0).epsilon(1e-12));
  CHECK(last.p.theta_o == doctest::Approx(0.2 - 0.2 * 5.0).epsilon(1e-12));
  // halving the tolerance moves a smooth endpoint by less than 10x tol
  const FlowRhs circular = [](const AnglePoint& p) {
    Velocity v;
    v.d_theta_e = -0.7 * std::sin(p.theta_o);
    v.d_theta_o = 0.7 * std::sin(p.theta_e);
    return v;
  };
  auto end = [&](double tol) {
    Trajectory t = integrate(circular, AnglePoint{1.0, 0.5, 0, 0}, 8.0, tol);
    return t.samples.back().p;
  };
  const AnglePoint a = end(1e-8), b = end(5e-9);
  CHECK(std::abs(a.theta_e - b.theta_e) < 1e-7);
  CHECK(std::abs(a.theta_o - b.theta_o) < 1e-7);
}

TEST_CASE("trajectory from the origin runs into the corner saddle") {
  const FlowRhs rhs = [](const AnglePoint& p) { return eom_rhs(p, 1, 1.0); };
  Trajectory tr = integrate(rhs, AnglePoint{1e-3, 1e-3, 0, 0}, 40.0, 1e-10,
                            0.0, 1);
  REQUIRE(!tr.samples.empty());
  // the symmetric trajectory heads to the saddle at (pi, pi); with corner
  // bridging it passes arbitrarily close before drifting off along the
  // unstable manifold, so the minimum distance over the trajectory is small
  double best = 1e9;
  for (const auto& s : tr.samples) {
    const double de = std::abs(wrap_angle(s.p.theta_e - M_PI));
    const double do_ = std::abs(wrap_angle(s.p.theta_o - M_PI));
    best = std::min(best, std::hypot(de, do_));
  }
  CHECK(best < 0.05);
}

TEST_CASE("Z2 orbits: frozen periods and integrated errors") {
  struct Row {
    int two_s;
    double period, eps, f;
  };
  // derived oracle values, frozen from two independent integrators
  const Row rows[] = {{1, 1.5341897136, 0.1746350135, 0.0052119458},
                      {2, 1.6422347284, 0.3181482528, 0.0212639113},
                      {4, 1.7342411063, 0.4070035552, 0.0452672805}};
  for (const Row& r : rows) {
    OrbitResult orb = find_orbit(r.two_s, 1.0);
    REQUIRE(orb.found);
    CHECK(orb.period / kTwoPi == doctest::Approx(r.period).epsilon(1e-7));
    CHECK(orb.eps_c == doctest::Approx(r.eps).epsilon(1e-6));
    CHECK(orb.f_c == doctest::Approx(r.f).epsilon(1e-6));
    CHECK(orb.closure < 1e-6);
    REQUIRE(orb.samples.size() > 100);
    // monodromy over one period stays near-unimodular (the orbit sits at the
    // edge of linear stability; quantum fluctuations, not the classical
    // multipliers, destabilize it)
    for (int i = 0; i < 2; ++i) {
      CHECK(std::abs(orb.monodromy_eigs[i]) > 0.9);
      CHECK(std::abs(orb.monodromy_eigs[i]) < 1.1);
    }
  }
  // omega only rescales time
  OrbitResult fast = find_orbit(1, 2.0);
  CHECK(fast.period == doctest::Approx(kTwoPi * 1.5341897136 / 2.0)
                           .epsilon(1e-7));
  CHECK(fast.eps_c == doctest::Approx(0.1746350135).epsilon(1e-6));
}

TEST_CASE("|0> orbit for s >= 1") {
  const double eps_ref[] = {1.1706909656, 1.1461759241};
  const double t_ref[] = {1.0039331594, 0.9860819927};
  int row = 0;
  for (int two_s : {2, 4}) {
    OrbitResult orb = find_orbit(two_s, 1.0, 0.0, true);
    REQUIRE(orb.found);
    CHECK(orb.period / kTwoPi == doctest::Approx(t_ref[row]).epsilon(1e-8));
    CHECK(orb.eps_c == doctest::Approx(eps_ref[row]).epsilon(1e-8));
    ++row;
  }
  // for s = 1/2 the diagonal hits the fixed point at (pi, pi): no orbit
  OrbitResult none = find_orbit(1, 1.0, 0.0, true);
  CHECK_FALSE(none.found);
}

TEST_CASE("orbit quantities are stable under tolerance and corner radius") {
  const OrbitResult a = find_orbit(1, 1.0, 0.0, false, 1e-10, 1e-5);
  const OrbitResult b = find_orbit(1, 1.0, 0.0, false, 5e-11, 1e-5);
  const OrbitResult c = find_orbit(1, 1.0, 0.0, false, 1e-10, 5e-6);
  REQUIRE(a.found);
  REQUIRE(b.found);
  REQUIRE(c.found);
  for (const OrbitResult* o : {&b, &c}) {
    CHECK(std::abs(o->period - a.period) / a.period < 1e-6);
    CHECK(std::abs(o->eps_c - a.eps_c) / a.eps_c < 1e-6);
    CHECK(std::abs(o->f_c - a.f_c) / a.f_c < 1e-6);
  }
}

TEST_CASE("deformation scan: monotone onset and finite-h error minimum") {
  auto rows = scan_h({0.0, 0.02, 0.0423, 0.07}, 1.0);
  REQUIRE(rows.size() == 4);
  for (const auto& r : rows) REQUIRE(r.found);
  CHECK(rows[0].eps_c == doctest::Approx(0.1746350135).epsilon(1e-6));
  // both error measures decrease from h = 0 towards the optimum
  CHECK(rows[1].eps_c < rows[0].eps_c);
  CHECK(rows[2].eps_c < rows[1].eps_c);
  CHECK(rows[1].f_c < rows[0].f_c);
  CHECK(rows[2].f_c < rows[1].f_c);
  // and eps_C turns back up past its minimum
  CHECK(rows[3].eps_c > rows[2].eps_c);
}

TEST_CASE("flow grid symmetries and orbit-hugging error minimum") {
  const int n = 16;
  auto grid = flow_grid(1, 1.0, 0.0, n);
  REQUIRE(grid.size() == std::size_t(n) * n);
  auto at = [&](int i, int j) -> const FlowGridNode& {
    return grid[std::size_t(i) * n + j];
  };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      // grid nodes at -pi + 2 pi k / n: the parity partner of (i, j) is
      // ((n - i) % n, (n - j) % n)
      const auto& a = at(i, j);
      const auto& b = at((n - i) % n, (n - j) % n);
      const auto& c = at(j, i);
      if (a.singular || b.singular || c.singular) continue;
      CHECK(a.v.d_theta_e == doctest::Approx(b.v.d_theta_e).epsilon(1e-12));
      CHECK(a.v.d_theta_o == doctest::Approx(b.v.d_theta_o).epsilon(1e-12));
      CHECK(a.v.d_theta_e == doctest::Approx(c.v.d_theta_o).epsilon(1e-12));
      CHECK(a.gamma == doctest::Approx(c.gamma).epsilon(1e-10));
    }
  }
  // gamma on the orbit is smaller than 0.15 rad off the orbit (sampled away
  // from the corners)
  OrbitResult orb = find_orbit(1, 1.0);
  REQUIRE(orb.found);
  int wins = 0, tries = 0;
  for (std::size_t k = 0; k < orb.samples.size(); k += 97) {
    const auto& s = orb.samples[k];
    if (std::abs(std::abs(s.p.theta_e) - M_PI) < 0.5) continue;
    if (std::abs(std::abs(s.p.theta_o) - M_PI) < 0.5) continue;
    const double g_on = gamma(s.p, 1, 1.0);
    const double norm = std::hypot(s.v.d_theta_o, -s.v.d_theta_e);
    if (norm < 1e-6) continue;
    AnglePoint qp = s.p, qm = s.p;
    qp.theta_e += 0.15 * s.v.d_theta_o / norm;
    qp.theta_o += -0.15 * s.v.d_theta_e / norm;
    qm.theta_e -= 0.15 * s.v.d_theta_o / norm;
    qm.theta_o -= -0.15 * s.v.d_theta_e / norm;
    ++tries;
    if (g_on < 0.5 * (gamma(qp, 1, 1.0) + gamma(qm, 1, 1.0))) ++wins;
  }
  REQUIRE(tries >= 3);
  CHECK(5 * wins >= 4 * tries);  // majority vote; gamma dips off-orbit too
}
