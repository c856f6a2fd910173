#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "cheeger_flow/flow_trace.hpp"
#include "cheeger_flow/grid.hpp"
#include "cheeger_flow/loop_functionals.hpp"
#include "cheeger_flow/surface.hpp"

namespace cheeger_flow {

/// Time-integration tolerances and stop thresholds.
/// min_area <= 0 means "resolve to 0.05 * initial area" at the start of a run.
struct StepControl {
  double cfl_factor = 0.2;    // dt = cfl * dtheta^2 * min(e^{2u})
  double dt_min = 0.0;        // lower clamp; triggering it is counted as a warning
  double dt_max = 1e-2;
  double t_end = 0.25;
  double min_area = 0.0;
  double max_curvature = 1e4;
};

inline void validate_control(const StepControl& c) {
  if (!(c.cfl_factor > 0.0 && c.cfl_factor <= 0.5)) {
    throw std::invalid_argument("StepControl: cfl_factor must lie in (0, 0.5]");
  }
  if (!(c.dt_min >= 0.0 && c.dt_min <= c.dt_max)) {
    throw std::invalid_argument("StepControl: need 0 <= dt_min <= dt_max");
  }
  if (!(c.t_end > 0.0)) {
    throw std::invalid_argument("StepControl: t_end must be positive");
  }
  if (!(c.max_curvature > 0.0)) {
    throw std::invalid_argument("StepControl: max_curvature must be positive");
  }
}

struct FlowState {
  SurfaceProfile profile;
  long step_count = 0;
  double last_dt = 0.0;
  bool last_dt_clamped = false;
};

/// Thrown when a step produces non-finite values (blow-up or instability).
struct flow_error : std::runtime_error {
  explicit flow_error(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown by evolve when a step fails; carries the last valid state and the
/// finalized partial trace.
struct evolve_error : std::runtime_error {
  FlowState last_valid;
  FlowTrace partial_trace;
  evolve_error(const std::string& what, FlowState s, FlowTrace t)
      : std::runtime_error(what), last_valid(std::move(s)), partial_trace(std::move(t)) {}
};

/// du/dt under the unnormalized Ricci flow in conformal gauge: -K nodewise.
inline std::vector<double> flow_rhs(const SurfaceProfile& p) {
  std::vector<double> rhs = gaussian_curvature(p);
  for (double& v : rhs) v = -v;
  return rhs;
}

namespace detail {

// unchecked RHS for the integrator stages
inline void rhs_into(const SurfaceProfile& p, std::vector<double>& out) {
  const int n = p.grid.n_intervals;
  out.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    out[i] = -std::exp(-2.0 * p.u[i]) * (1.0 - laplace_hat(p, i));
  }
}

inline double stable_dt(const SurfaceProfile& p, const StepControl& c) {
  double umin = p.u[0];
  for (double v : p.u) umin = std::min(umin, v);
  const double h = p.grid.dtheta();
  return std::min(c.dt_max, c.cfl_factor * h * h * std::exp(2.0 * umin));
}

}  // namespace detail

/// One classical 4-stage explicit step.  dt is the diffusive bound
/// min(dt_max, cfl * dtheta^2 * min e^{2u}), clamped below by dt_min (the
/// clamp is flagged on the returned state) and clipped so the run lands on
/// t_end exactly.
inline FlowState step(const FlowState& s, const StepControl& c) {
  validate_control(c);
  require_valid(s.profile);

  double dt = detail::stable_dt(s.profile, c);
  bool clamped = false;
  if (dt < c.dt_min) {
    dt = c.dt_min;
    clamped = true;
  }
  const double remaining = c.t_end - s.profile.time;
  if (remaining > 0.0 && dt > remaining) dt = remaining;
  if (!(dt > 0.0)) throw flow_error("step: non-positive dt");

  const int n = s.profile.grid.n_intervals;
  SurfaceProfile work = s.profile;
  std::vector<double> k1, k2, k3, k4;

  detail::rhs_into(s.profile, k1);
  for (int i = 0; i <= n; ++i) work.u[i] = s.profile.u[i] + 0.5 * dt * k1[i];
  detail::rhs_into(work, k2);
  for (int i = 0; i <= n; ++i) work.u[i] = s.profile.u[i] + 0.5 * dt * k2[i];
  detail::rhs_into(work, k3);
  for (int i = 0; i <= n; ++i) work.u[i] = s.profile.u[i] + dt * k3[i];
  detail::rhs_into(work, k4);

  FlowState next = s;
  for (int i = 0; i <= n; ++i) {
    next.profile.u[i] =
        s.profile.u[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if (!std::isfinite(next.profile.u[i])) {
      throw flow_error("step: non-finite profile at t = " +
                       std::to_string(s.profile.time) + " (blow-up or instability)");
    }
  }
  next.profile.time = s.profile.time + dt;
  next.step_count = s.step_count + 1;
  next.last_dt = dt;
  next.last_dt_clamped = clamped;
  return next;
}

namespace detail {

struct Observables {
  double area = 0.0;
  double max_abs_curvature = 0.0;
  TraceRecord record;
};

inline Observables observe(const SurfaceProfile& p) {
  const int n = p.grid.n_intervals;
  Observables o;
  const auto tables = loop_tables(p);
  o.area = tables.total;

  double max_k = 0.0;
  for (int i = 0; i <= n; ++i) {
    max_k = std::max(max_k, std::abs(std::exp(-2.0 * p.u[i]) * (1.0 - laplace_hat(p, i))));
  }
  o.max_abs_curvature = max_k;

  std::vector<double> h(n + 1, 0.0);
  int best = -1;
  double best_h = 0.0;
  double best_min_form = std::numeric_limits<double>::infinity();
  for (int i = 1; i < n; ++i) {
    const double L = parallel_length(p, i);
    const double ap = tables.caps[i];
    const double am = tables.total - tables.caps[i];
    h[i] = L * (1.0 / ap + 1.0 / am);
    if (best < 0 || h[i] < best_h) {
      best = i;
      best_h = h[i];
    }
    best_min_form = std::min(best_min_form, L / std::min(ap, am));
  }
  const ParallelLoopStats s = stats_from_tables(p, tables, best);

  TraceRecord r;
  r.t = p.time;
  r.area = o.area;
  r.h_sum_global = s.h_sum;
  r.h_min_global = best_min_form;
  r.argmin_theta = s.theta;
  if (best > 1 && best < n - 1) {
    const double denom = h[best + 1] - 2.0 * h[best] + h[best - 1];
    if (denom > 0.0) {
      r.argmin_theta += 0.5 * (h[best - 1] - h[best + 1]) / denom * p.grid.dtheta();
    }
  }
  r.L_at_min = s.L;
  r.gamma_at_min = s.gamma_total;
  r.hamilton_at_min = s.hamilton_ratio;
  r.threshold_ok = s.hamilton_ratio < 4.0 * pi * (1.0 - threshold_strictness_guard);
  r.papasoglu_ok = best_min_form <= (16.0 / std::sqrt(o.area)) * (1.0 + 1e-3);
  o.record = r;
  return o;
}

}  // namespace detail

using FlowObserver = std::function<void(const FlowState&, const TraceRecord&)>;

inline constexpr long max_flow_steps = 2'000'000;

/// Integrates from s0 until t_end, the area floor, or the curvature ceiling,
/// whichever comes first, recording one TraceRecord per accepted step (plus
/// the initial state).  The observer, when given, sees each recorded state
/// and must not mutate it.
inline FlowTrace evolve(const FlowState& s0, const StepControl& control,
                        const FlowObserver& observer = {}) {
  StepControl c = control;
  validate_control(c);
  require_valid(s0.profile);

  FlowState s = s0;
  FlowTrace trace;
  if (c.min_area <= 0.0) c.min_area = 0.05 * total_area(s0.profile);

  const double t_land = c.t_end * (1.0 - 1e-12);
  while (true) {
    const detail::Observables o = detail::observe(s.profile);
    trace.records.push_back(o.record);
    if (observer) observer(s, o.record);

    if (s.profile.time >= t_land) {
      trace.stop_reason = "t_end";
      break;
    }
    if (o.area <= c.min_area) {
      trace.stop_reason = "area_floor";
      break;
    }
    if (o.max_abs_curvature >= c.max_curvature) {
      trace.stop_reason = "curvature_blowup";
      break;
    }
    if (s.step_count >= max_flow_steps) {
      trace.stop_reason = "step_limit";
      break;
    }
    try {
      s = step(s, c);
    } catch (const flow_error& e) {
      trace.stop_reason = "step_failed";
      trace.finalize();
      throw evolve_error(e.what(), s, std::move(trace));
    }
    if (s.last_dt_clamped) ++trace.dt_clamp_count;
  }
  trace.finalize();
  return trace;
}

/// Max relative deviation from the linear area law A(t) = A(0) - 8 pi t
/// over the recorded steps.
inline double area_law_check(const FlowTrace& trace) {
  if (trace.records.empty()) {
    throw std::invalid_argument("area_law_check: empty trace");
  }
  const double a0 = trace.records.front().area;
  const double t0 = trace.records.front().t;
  double worst = 0.0;
  for (const TraceRecord& r : trace.records) {
    const double predicted = a0 - 8.0 * pi * (r.t - t0);
    worst = std::max(worst, std::abs(r.area - predicted) / a0);
  }
  return worst;
}

}  // namespace cheeger_flow
