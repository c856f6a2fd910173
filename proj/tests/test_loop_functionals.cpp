#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "cheeger_flow/loop_functionals.hpp"
#include "cheeger_flow/scenarios.hpp"
#include "oracles.hpp"

using namespace cheeger_flow;
using Catch::Approx;

TEST_CASE("loop_stats on round spheres") {
  const auto unit = round_sphere(1.0, 192);
  SECTION("equator") {
    const auto s = loop_stats(unit, 96);
    CHECK(s.L == Approx(2.0 * pi).epsilon(1e-14));
    CHECK(s.A_plus == Approx(2.0 * pi).epsilon(1e-13));
    CHECK(s.A_minus == Approx(2.0 * pi).epsilon(1e-13));
    CHECK(s.h_sum == Approx(2.0).epsilon(1e-13));
    CHECK(s.h_min == Approx(1.0).epsilon(1e-13));
    CHECK(s.hamilton_ratio == Approx(4.0 * pi).epsilon(1e-13));
    CHECK(s.rho == Approx(pi / 2.0).margin(1e-10));
  }
  SECTION("theta = pi/3: h_sum = 2/sin(pi/3)") {
    const auto s = loop_stats(unit, 64);
    CHECK(s.h_sum == Approx(2.0 / std::sin(pi / 3.0)).epsilon(1e-13));
    CHECK(s.h_sum == Approx(2.3094010767585034).epsilon(1e-12));
  }
  SECTION("radius r: h_sum(equator) = 2/r") {
    const auto r2 = round_sphere(2.0, 192);
    CHECK(loop_stats(r2, 96).h_sum == Approx(1.0).epsilon(1e-13));
  }
  SECTION("hamilton_ratio is exactly h_sum * L") {
    const auto s = loop_stats(unit, 40);
    CHECK(s.hamilton_ratio == s.h_sum * s.L);
  }
  SECTION("poles rejected") {
    CHECK_THROWS_AS(loop_stats(unit, 0), std::out_of_range);
    CHECK_THROWS_AS(loop_stats(unit, 192), std::out_of_range);
  }
}

TEST_CASE("h_sum and h_min bracket each other") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 6; ++trial) {
    const auto p = oracle::random_profile(rng, 80);
    for (int i = 1; i < 80; ++i) {
      const auto s = loop_stats(p, i);
      CHECK(s.h_min <= s.h_sum * (1.0 + 1e-14));
      CHECK(s.h_sum <= 2.0 * s.h_min * (1.0 + 1e-14));
    }
  }
  // equality h_sum = 2 h_min iff the caps balance (equator of a symmetric profile)
  const auto b = bump_sphere(0.25, 0.5, 128);
  const auto s = loop_stats(b, 64);
  CHECK(s.A_plus == Approx(s.A_minus).epsilon(1e-12));
  CHECK(s.h_sum == Approx(2.0 * s.h_min).epsilon(1e-12));
}

TEST_CASE("gamma_geodesic") {
  const auto unit = round_sphere(1.0, 192);
  SECTION("round-sphere closed forms") {
    CHECK(gamma_geodesic(unit, 96) == Approx(0.0).margin(1e-13));
    CHECK(gamma_geodesic(unit, 64) == Approx(pi).epsilon(1e-13));      // theta = pi/3
    CHECK(gamma_geodesic(unit, 128) == Approx(-pi).epsilon(1e-13));    // theta = 2pi/3
  }
  SECTION("matches dL/drho within stencil tolerance") {
    const auto b = bump_sphere(0.3, 0.5, 256);
    const double h = b.grid.dtheta();
    for (int i = 8; i <= 248; i += 16) {
      const double dl_drho = std::exp(-b.u[i]) *
                             (circumference(b, i + 1) - circumference(b, i - 1)) /
                             (2.0 * h);
      CHECK(gamma_geodesic(b, i) == Approx(dl_drho).margin(5e-3));
    }
  }
  SECTION("vanishes at the equator of mirror-symmetric profiles") {
    CHECK(std::abs(gamma_geodesic(bump_sphere(0.3, 0.5, 128), 64)) < 1e-13);
    CHECK(std::abs(gamma_geodesic(dumbbell(0.5, 0.4, 128), 64)) < 1e-13);
  }
  SECTION("pole rejected") {
    CHECK_THROWS_AS(gamma_geodesic(unit, 0), std::out_of_range);
  }
}

TEST_CASE("global_cheeger") {
  SECTION("unit sphere: equator, h = 2, refined angle pi/2") {
    const auto g = global_cheeger(round_sphere(1.0, 256));
    CHECK(g.stats.node_index == 128);
    CHECK(g.stats.h_sum == Approx(2.0).epsilon(1e-13));
    CHECK(g.refined_theta == Approx(pi / 2.0).margin(1e-10));
  }
  SECTION("radius-2 sphere: h = 1") {
    CHECK(global_cheeger(round_sphere(2.0, 256)).stats.h_sum == Approx(1.0).epsilon(1e-13));
  }
  SECTION("bump profile: minimizer at the equator, value vs refined grid") {
    const auto g = global_cheeger(bump_sphere(0.3, 0.5, 256));
    CHECK(g.stats.node_index == 128);
    // regression pin at n = 256 plus the 4x-resolution scan
    CHECK(g.stats.h_sum == Approx(2.0533957506024412).epsilon(1e-12));
    const auto fine = global_cheeger(bump_sphere(0.3, 0.5, 1024));
    CHECK(fine.stats.node_index == 512);
    CHECK(g.stats.h_sum == Approx(fine.stats.h_sum).margin(1e-4));
  }
  SECTION("argmin node is invariant under u -> u + c") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 4; ++trial) {
      auto p = oracle::random_profile(rng, 96);
      const int before = global_cheeger(p).stats.node_index;
      for (double& v : p.u) v += 0.8;
      CHECK(global_cheeger(p).stats.node_index == before);
    }
  }
}

TEST_CASE("h_sum(theta) sin(theta) = 2 on the unit sphere") {
  const auto unit = round_sphere(1.0, 256);
  for (int i = 1; i < 256; ++i) {
    const auto s = loop_stats(unit, i);
    CHECK(s.h_sum * std::sin(s.theta) == Approx(2.0).margin(1e-12));
  }
}

TEST_CASE("papasoglu bound") {
  SECTION("unit sphere: bound 16/sqrt(4 pi) = 4.51352, h_min = 1") {
    const auto b = papasoglu_bound(round_sphere(1.0, 256));
    CHECK(b.bound == Approx(4.5135166683820476).epsilon(1e-12));
    CHECK(b.bound == Approx(8.0 / std::sqrt(pi)).epsilon(1e-12));
    CHECK(b.h_min_global == Approx(1.0).epsilon(1e-12));
    CHECK(b.satisfied);
  }
  SECTION("radius-2 sphere: both sides scale by 1/r") {
    const auto b = papasoglu_bound(round_sphere(2.0, 256));
    CHECK(b.bound == Approx(4.5135166683820476 / 2.0).epsilon(1e-12));
    CHECK(b.h_min_global == Approx(0.5).epsilon(1e-12));
    CHECK(b.satisfied);
  }
  SECTION("bump and dumbbell profiles satisfy the bound") {
    CHECK(papasoglu_bound(bump_sphere(0.3, 0.5, 256)).satisfied);
    CHECK(papasoglu_bound(dumbbell(0.5, 0.4, 256)).satisfied);
  }
}
