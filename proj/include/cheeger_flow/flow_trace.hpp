#pragma once

#include <string>
#include <vector>

namespace cheeger_flow {

/// Per-step observables of a flow run.  threshold_ok is the strict
/// Hamilton-ratio gate hamilton_at_min < 4 pi (1 - 1e-9); papasoglu_ok is
/// the 16/sqrt(A) bound with 1e-3 relative slack.  dh_dt is filled in by
/// FlowTrace::finalize from the h_sum_global series (centered differences,
/// one-sided second order at the endpoints).
struct TraceRecord {
  double t = 0.0;
  double area = 0.0;
  double h_sum_global = 0.0;
  double h_min_global = 0.0;
  double argmin_theta = 0.0;
  double L_at_min = 0.0;
  double gamma_at_min = 0.0;
  double hamilton_at_min = 0.0;
  double dh_dt = 0.0;
  bool threshold_ok = false;
  bool papasoglu_ok = false;
};

inline constexpr double threshold_strictness_guard = 1e-9;

namespace detail {

/// Derivative of the parabola through three samples, evaluated at x.
inline double three_point_derivative(double x, double x0, double f0, double x1,
                                     double f1, double x2, double f2) {
  return f0 * (2.0 * x - x1 - x2) / ((x0 - x1) * (x0 - x2)) +
         f1 * (2.0 * x - x0 - x2) / ((x1 - x0) * (x1 - x2)) +
         f2 * (2.0 * x - x0 - x1) / ((x2 - x0) * (x2 - x1));
}

}  // namespace detail

/// Time series of the global isoperimetric quantities along one flow run.
/// stop_reason on completion is one of "t_end", "area_floor",
/// "curvature_blowup", "step_limit" (or "step_failed" on a partial trace
/// attached to an evolve_error).
struct FlowTrace {
  std::vector<TraceRecord> records;
  std::string stop_reason;
  int dt_clamp_count = 0;

  /// Fills dh_dt from the recorded h_sum_global values.
  void finalize() {
    const std::size_t m = records.size();
    if (m == 0) return;
    if (m == 1) {
      records[0].dh_dt = 0.0;
      return;
    }
    if (m == 2) {
      const double s = (records[1].h_sum_global - records[0].h_sum_global) /
                       (records[1].t - records[0].t);
      records[0].dh_dt = s;
      records[1].dh_dt = s;
      return;
    }
    auto d = [&](std::size_t at, std::size_t i0, std::size_t i1, std::size_t i2) {
      return detail::three_point_derivative(
          records[at].t, records[i0].t, records[i0].h_sum_global, records[i1].t,
          records[i1].h_sum_global, records[i2].t, records[i2].h_sum_global);
    };
    records[0].dh_dt = d(0, 0, 1, 2);
    for (std::size_t k = 1; k + 1 < m; ++k) records[k].dh_dt = d(k, k - 1, k, k + 1);
    records[m - 1].dh_dt = d(m - 1, m - 3, m - 2, m - 1);
  }
};

}  // namespace cheeger_flow
