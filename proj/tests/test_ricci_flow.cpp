#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cheeger_flow/ricci_flow.hpp"
#include "cheeger_flow/scenarios.hpp"
#include "oracles.hpp"

using namespace cheeger_flow;
using Catch::Approx;

TEST_CASE("flow_rhs is -K") {
  const auto p = bump_sphere(0.3, 0.5, 64);
  const auto rhs = flow_rhs(p);
  const auto K = gaussian_curvature(p);
  for (int i = 0; i <= 64; ++i) CHECK(rhs[i] == -K[i]);
  CHECK(flow_rhs(round_sphere(1.0, 64))[10] == Approx(-1.0).margin(1e-14));
  CHECK(flow_rhs(round_sphere(2.0, 64))[10] == Approx(-0.25).margin(1e-14));
}

TEST_CASE("step control validation") {
  StepControl c;
  c.cfl_factor = 0.9;
  CHECK_THROWS_AS(validate_control(c), std::invalid_argument);
  c = StepControl{};
  c.dt_min = 1.0;
  c.dt_max = 0.5;
  CHECK_THROWS_AS(validate_control(c), std::invalid_argument);
  CHECK_NOTHROW(validate_control(StepControl{}));
}

TEST_CASE("one step on the unit sphere") {
  const FlowState s0{round_sphere(1.0, 256), 0, 0.0, false};
  const StepControl c;
  const FlowState s1 = step(s0, c);

  SECTION("dt follows the diffusive bound") {
    const double h = pi / 256.0;
    CHECK(s1.last_dt == Approx(0.2 * h * h).epsilon(1e-12));
  }
  SECTION("matches the exact solution u(t) = log(1 - 2t)/2 to integrator order") {
    const double exact = 0.5 * std::log(1.0 - 2.0 * s1.profile.time);
    CHECK(s1.profile.u[0] == Approx(exact).margin(1e-15));
  }
  SECTION("stays spatially constant") {
    double lo = s1.profile.u[0], hi = s1.profile.u[0];
    for (double v : s1.profile.u) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    CHECK(hi - lo <= 1e-16);
  }
}

TEST_CASE("mirror symmetry is preserved by a step") {
  FlowState s{dumbbell(0.5, 0.4, 128), 0, 0.0, false};
  const StepControl c;
  for (int k = 0; k < 5; ++k) s = step(s, c);
  const int n = 128;
  for (int i = 0; i <= n; ++i) {
    CHECK(s.profile.u[i] == Approx(s.profile.u[n - i]).margin(1e-13));
  }
}

TEST_CASE("evolve: unit sphere to t = 0.25") {
  StepControl c;
  c.t_end = 0.25;
  const auto tr = evolve(FlowState{round_sphere(1.0, 256), 0, 0.0, false}, c);
  CHECK(tr.stop_reason == "t_end");
  CHECK(tr.records.back().t == Approx(0.25).margin(1e-12));
  CHECK(std::abs(tr.records.back().area - 2.0 * pi) / (4.0 * pi) <= 1e-9);
  CHECK(area_law_check(tr) <= 1e-9);
}

TEST_CASE("evolve: unit sphere to t = 0.45") {
  StepControl c;
  c.t_end = 0.45;
  c.min_area = 0.1;  // below 0.4 pi so t_end is reached
  const auto tr = evolve(FlowState{round_sphere(1.0, 128), 0, 0.0, false}, c);
  CHECK(tr.stop_reason == "t_end");
  CHECK(tr.records.back().area == Approx(0.4 * pi).epsilon(1e-8));
  for (std::size_t k = 1; k < tr.records.size(); ++k) {
    CHECK(tr.records[k].h_sum_global > tr.records[k - 1].h_sum_global);
  }
}

TEST_CASE("evolve: area floor stop") {
  StepControl c;
  c.t_end = 1.0;
  c.min_area = 5.0;
  const auto tr = evolve(FlowState{round_sphere(1.0, 128), 0, 0.0, false}, c);
  CHECK(tr.stop_reason == "area_floor");
  CHECK(tr.records.back().area <= 5.0);
  CHECK(tr.records.back().t == Approx((4.0 * pi - 5.0) / (8.0 * pi)).margin(2e-3));
}

TEST_CASE("evolve: curvature ceiling stop") {
  StepControl c;
  c.t_end = 10.0;
  c.min_area = 1e-12;
  c.max_curvature = 4.0;  // K = 1/(1 - 2t) crosses 4 at t = 0.375
  const auto tr = evolve(FlowState{round_sphere(1.0, 64), 0, 0.0, false}, c);
  CHECK(tr.stop_reason == "curvature_blowup");
  CHECK(tr.records.back().t == Approx(0.375).margin(2e-3));
}

TEST_CASE("constant-curvature exact solution at radius 2") {
  StepControl c;
  c.t_end = 0.5;
  FlowState s{round_sphere(2.0, 128), 0, 0.0, false};
  while (s.profile.time < c.t_end * (1.0 - 1e-12)) s = step(s, c);
  // e^{2u(t)} = 4 - 2t
  const double exact = 0.5 * std::log(4.0 - 2.0 * c.t_end);
  CHECK(s.profile.u[64] == Approx(exact).margin(1e-12));
}

TEST_CASE("area law on the bump profile") {
  StepControl c;
  c.t_end = 0.1;
  const auto tr = evolve(FlowState{bump_sphere(0.3, 0.5, 256), 0, 0.0, false}, c);
  CHECK(area_law_check(tr) <= 1e-5);
}

TEST_CASE("area_law_check edge cases") {
  FlowTrace tr;
  CHECK_THROWS_AS(area_law_check(tr), std::invalid_argument);
  TraceRecord r;
  r.t = 0.0;
  r.area = 4.0 * pi;
  tr.records.push_back(r);
  CHECK(area_law_check(tr) == 0.0);
}

TEST_CASE("dt_min clamp is counted") {
  StepControl c;
  c.dt_min = 1e-3;  // far above the diffusive bound at n = 64
  c.t_end = 3e-3;
  const auto tr = evolve(FlowState{round_sphere(1.0, 64), 0, 0.0, false}, c);
  CHECK(tr.dt_clamp_count >= 1);
}

TEST_CASE("blow-up raises evolve_error with the last valid state") {
  StepControl c;
  c.dt_min = 0.5;  // wildly unstable forced step
  c.dt_max = 0.5;
  c.t_end = 10.0;
  c.min_area = 1e-12;
  bool threw = false;
  try {
    evolve(FlowState{dumbbell(0.5, 0.4, 64), 0, 0.0, false}, c);
  } catch (const evolve_error& e) {
    threw = true;
    CHECK(e.partial_trace.stop_reason == "step_failed");
    CHECK_FALSE(e.partial_trace.records.empty());
    CHECK(validate_profile(e.last_valid.profile).empty());
  }
  CHECK(threw);
}

TEST_CASE("trace dh_dt finalization") {
  FlowTrace tr;
  for (int k = 0; k <= 10; ++k) {
    TraceRecord r;
    r.t = 0.01 * k;
    r.h_sum_global = oracle::round_h_of_t(r.t);
    r.area = 4.0 * pi - 8.0 * pi * r.t;
    tr.records.push_back(r);
  }
  tr.finalize();
  for (const auto& r : tr.records) {
    const double exact = 2.0 / std::pow(1.0 - 2.0 * r.t, 1.5);
    CHECK(r.dh_dt == Approx(exact).epsilon(2e-3));
  }
}
