#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "cheeger_flow/flow_trace.hpp"
#include "cheeger_flow/grid.hpp"
#include "cheeger_flow/loop_functionals.hpp"
#include "cheeger_flow/surface.hpp"

namespace cheeger_flow {

/// Nodewise residual of one evolution identity over a theta window.
/// per_node[k] is the residual at node first_node + k.
struct ResidualReport {
  std::string name;
  int grid_n = 0;
  double theta_lo = 0.0;
  double theta_hi = 0.0;
  int first_node = 0;
  std::vector<double> per_node;
  double sup_norm = 0.0;
  double l2_norm = 0.0;  // root mean square over the window
};

/// Residuals are evaluated away from the poles, where the log-quantities
/// degenerate; this window matches the stencil-safe interior band.
inline constexpr double default_window_lo = 0.2;
inline double default_window_hi() { return pi - 0.2; }

namespace detail {

/// Discrete meridian derivatives of a log-quantity q, split as
/// q = qhat(theta) + v with qhat the round-sphere closed form.  The
/// reference is differentiated analytically and only the deviation v is
/// differenced, so the residuals vanish to rounding on round spheres and
/// measure pure stencil plus quadrature error otherwise:
///   d/drho q     = e^{-u} (qhat' + D1 v)
///   d^2/drho^2 q = e^{-2u} (qhat'' - D1u qhat' + D2 v - D1u D1 v)
struct RhoDerivs {
  double first = 0.0;
  double second = 0.0;
};

inline RhoDerivs rho_derivs(const SurfaceProfile& p, const std::vector<double>& v,
                            int i, double qhat_d1, double qhat_d2) {
  const double h = p.grid.dtheta();
  const double du = d1(p.u, i, h);
  const double dv = d1(v, i, h);
  const double ddv = d2(v, i, h);
  const double eu = std::exp(-p.u[i]);
  RhoDerivs out;
  out.first = eu * (qhat_d1 + dv);
  out.second = eu * eu * (qhat_d2 - du * qhat_d1 + ddv - du * dv);
  return out;
}

struct WindowNodes {
  int lo = 0, hi = 0;  // inclusive node range
};

inline WindowNodes window_nodes(const GridSpec& g, double theta_lo, double theta_hi) {
  WindowNodes w;
  w.lo = 2;
  w.hi = g.n_intervals - 2;
  while (w.lo <= w.hi && g.theta(w.lo) < theta_lo) ++w.lo;
  while (w.hi >= w.lo && g.theta(w.hi) > theta_hi) --w.hi;
  if (w.lo > w.hi) {
    throw std::invalid_argument("residual window contains no interior nodes");
  }
  return w;
}

inline void fill_norms(ResidualReport& r) {
  double sup = 0.0, sq = 0.0;
  for (double v : r.per_node) {
    sup = std::max(sup, std::abs(v));
    sq += v * v;
  }
  r.sup_norm = sup;
  r.l2_norm = r.per_node.empty() ? 0.0 : std::sqrt(sq / r.per_node.size());
}

inline double curvature_at(const SurfaceProfile& p, int i) {
  return std::exp(-2.0 * p.u[i]) * (1.0 - laplace_hat(p, i));
}

}  // namespace detail

/// Residual of the parallel-length evolution identity
///   dt log L = drho^2 log L + (Gamma/L) drho log L     (both sides = -K).
inline ResidualReport residual_12a(const SurfaceProfile& p,
                                   double theta_lo = default_window_lo,
                                   double theta_hi = default_window_hi()) {
  require_valid(p);
  const auto w = detail::window_nodes(p.grid, theta_lo, theta_hi);
  ResidualReport rep;
  rep.name = "log_length_evolution";
  rep.grid_n = p.grid.n_intervals;
  rep.theta_lo = theta_lo;
  rep.theta_hi = theta_hi;
  rep.first_node = w.lo;
  rep.per_node.reserve(w.hi - w.lo + 1);
  // deviation of log L from log(2 pi sin theta) is u itself
  for (int i = w.lo; i <= w.hi; ++i) {
    const double th = p.grid.theta(i);
    const double cot = std::cos(th) / std::sin(th);
    const double csc2 = 1.0 / (std::sin(th) * std::sin(th));
    const auto dL = detail::rho_derivs(p, p.u, i, cot, -csc2);
    const double gamma_over_L = std::exp(-p.u[i]) * (cot + detail::d1(p.u, i, p.grid.dtheta()));
    const double rhs = dL.second + gamma_over_L * dL.first;
    rep.per_node.push_back(-detail::curvature_at(p, i) - rhs);
  }
  detail::fill_norms(rep);
  return rep;
}

namespace detail {

struct CapLogDeviations {
  std::vector<double> v_plus, v_minus;  // log A_pm minus round-sphere reference
  std::vector<double> caps;
  double total = 0.0;
};

inline CapLogDeviations cap_log_deviations(const SurfaceProfile& p) {
  CapLogDeviations d;
  d.caps = cap_area_prefix(p);
  d.total = d.caps.back();
  const int n = p.grid.n_intervals;
  d.v_plus.assign(n + 1, 0.0);
  d.v_minus.assign(n + 1, 0.0);
  for (int i = 1; i < n; ++i) {
    const double th = p.grid.theta(i);
    d.v_plus[i] = std::log(d.caps[i] / (2.0 * pi * (1.0 - std::cos(th))));
    d.v_minus[i] = std::log((d.total - d.caps[i]) / (2.0 * pi * (1.0 + std::cos(th))));
  }
  return d;
}

struct CapResidualTerms {
  double plus = 0.0, minus = 0.0;
};

inline CapResidualTerms residual_12b_at(const SurfaceProfile& p,
                                        const CapLogDeviations& d, int i) {
  const double th = p.grid.theta(i);
  const double s = std::sin(th);
  const double c = std::cos(th);
  const double L = parallel_length(p, i);
  const double gamma = gamma_at(p, i);
  const double gamma_over_L = gamma / L;
  const double ap = d.caps[i];
  const double am = d.total - d.caps[i];

  const auto dp = rho_derivs(p, d.v_plus, i, s / (1.0 - c), -1.0 / (1.0 - c));
  const auto dm = rho_derivs(p, d.v_minus, i, -s / (1.0 + c), -1.0 / (1.0 + c));

  const double lhs_plus = (2.0 * gamma - 4.0 * pi) / ap;
  const double rhs_plus =
      dp.second + L * L / (ap * ap) - 4.0 * pi / ap + gamma_over_L * dp.first;
  const double lhs_minus = (-2.0 * gamma - 4.0 * pi) / am;
  const double rhs_minus =
      dm.second + L * L / (am * am) - 4.0 * pi / am + gamma_over_L * dm.first;

  return {lhs_plus - rhs_plus, lhs_minus - rhs_minus};
}

}  // namespace detail

/// Residuals of the cap-area evolution identities at interior node i.
/// The left sides are the Gauss-Bonnet time derivatives
///   dt log A_plus  = (2 Gamma - 4 pi) / A_plus,
///   dt log A_minus = (-2 Gamma - 4 pi) / A_minus,
/// the right sides the heat-form expressions in meridian derivatives.
inline std::pair<double, double> residual_12b(const SurfaceProfile& p, int i) {
  require_valid(p);
  require_interior_index(p, i);
  if (i < 2 || i > p.grid.n_intervals - 2) {
    throw std::out_of_range("residual_12b: node too close to a pole for the stencil");
  }
  const auto d = detail::cap_log_deviations(p);
  const auto r = detail::residual_12b_at(p, d, i);
  return {r.plus, r.minus};
}

/// Windowed reports for both cap residuals.
inline std::pair<ResidualReport, ResidualReport> residual_12b_reports(
    const SurfaceProfile& p, double theta_lo = default_window_lo,
    double theta_hi = default_window_hi()) {
  require_valid(p);
  const auto w = detail::window_nodes(p.grid, theta_lo, theta_hi);
  const auto d = detail::cap_log_deviations(p);
  ResidualReport plus, minus;
  plus.name = "log_cap_plus_evolution";
  minus.name = "log_cap_minus_evolution";
  for (ResidualReport* r : {&plus, &minus}) {
    r->grid_n = p.grid.n_intervals;
    r->theta_lo = theta_lo;
    r->theta_hi = theta_hi;
    r->first_node = w.lo;
    r->per_node.reserve(w.hi - w.lo + 1);
  }
  for (int i = w.lo; i <= w.hi; ++i) {
    const auto r = detail::residual_12b_at(p, d, i);
    plus.per_node.push_back(r.plus);
    minus.per_node.push_back(r.minus);
  }
  detail::fill_norms(plus);
  detail::fill_norms(minus);
  return {plus, minus};
}

namespace detail {

struct Heat9Terms {
  double lhs = 0.0, rhs = 0.0;
};

inline Heat9Terms heat9_at(const SurfaceProfile& p, const CapLogDeviations& d,
                           const std::vector<double>& v_h, int i) {
  const double th = p.grid.theta(i);
  const double s = std::sin(th);
  const double cot = std::cos(th) / s;
  const double csc2 = 1.0 / (s * s);
  const double L = parallel_length(p, i);
  const double gamma = gamma_at(p, i);
  const double ap = d.caps[i];
  const double am = d.total - d.caps[i];
  const double area = d.total;
  const double h_sum = L * (1.0 / ap + 1.0 / am);

  Heat9Terms t;
  // material time derivative of log h = log L - log A+ - log A- + log A
  t.lhs = -curvature_at(p, i) - (2.0 * gamma - 4.0 * pi) / ap -
          (-2.0 * gamma - 4.0 * pi) / am - 8.0 * pi / area;
  const auto dh = rho_derivs(p, v_h, i, -cot, csc2);
  const double bracket = ap / am + am / ap;
  t.rhs = dh.second + (gamma / L) * dh.first +
          ((4.0 * pi - h_sum * L) / area) * bracket;
  return t;
}

inline std::vector<double> h_log_deviations(const SurfaceProfile& p,
                                            const CapLogDeviations& d) {
  const int n = p.grid.n_intervals;
  std::vector<double> v(n + 1, 0.0);
  for (int i = 1; i < n; ++i) {
    const double L = parallel_length(p, i);
    const double ap = d.caps[i];
    const double am = d.total - d.caps[i];
    const double h = L * (1.0 / ap + 1.0 / am);
    // reference h is 2 / sin(theta)
    v[i] = std::log(0.5 * h * std::sin(p.grid.theta(i)));
  }
  return v;
}

}  // namespace detail

/// Both sides of the heat-type equation for log h at interior node i
/// (h means the sum form throughout).
inline std::pair<double, double> heat9_sides(const SurfaceProfile& p, int i) {
  require_valid(p);
  require_interior_index(p, i);
  if (i < 2 || i > p.grid.n_intervals - 2) {
    throw std::out_of_range("heat9_sides: node too close to a pole for the stencil");
  }
  const auto d = detail::cap_log_deviations(p);
  const auto v_h = detail::h_log_deviations(p, d);
  const auto t = detail::heat9_at(p, d, v_h, i);
  return {t.lhs, t.rhs};
}

/// Residual of the heat-type equation for log h over the window.
inline ResidualReport residual_heat_9(const SurfaceProfile& p,
                                      double theta_lo = default_window_lo,
                                      double theta_hi = default_window_hi()) {
  require_valid(p);
  const auto w = detail::window_nodes(p.grid, theta_lo, theta_hi);
  const auto d = detail::cap_log_deviations(p);
  const auto v_h = detail::h_log_deviations(p, d);
  ResidualReport rep;
  rep.name = "log_h_heat_equation";
  rep.grid_n = p.grid.n_intervals;
  rep.theta_lo = theta_lo;
  rep.theta_hi = theta_hi;
  rep.first_node = w.lo;
  rep.per_node.reserve(w.hi - w.lo + 1);
  for (int i = w.lo; i <= w.hi; ++i) {
    const auto t = detail::heat9_at(p, d, v_h, i);
    rep.per_node.push_back(t.lhs - t.rhs);
  }
  detail::fill_norms(rep);
  return rep;
}

/// Both sides of 4pi/A+ + 4pi/A- - 8pi/A = (4pi/A)(A+/A- + A-/A+).
inline std::pair<double, double> identity_13a(double a_plus, double a_minus) {
  if (!(a_plus > 0.0) || !(a_minus > 0.0)) {
    throw std::invalid_argument("identity_13a: areas must be positive");
  }
  const double a = a_plus + a_minus;
  const double lhs = 4.0 * pi / a_plus + 4.0 * pi / a_minus - 8.0 * pi / a;
  const double rhs = (4.0 * pi / a) * (a_plus / a_minus + a_minus / a_plus);
  return {lhs, rhs};
}

struct Identity13b {
  double lhs = 0.0;  // L^2/A+^2 + L^2/A-^2
  double mid = 0.0;  // (L^2/(A+ A-)) (A+/A- + A-/A+)
  double rhs = 0.0;  // (h L / A) (A+/A- + A-/A+), h in the sum form
};

inline Identity13b identity_13b(double length, double a_plus, double a_minus) {
  if (!(length > 0.0) || !(a_plus > 0.0) || !(a_minus > 0.0)) {
    throw std::invalid_argument("identity_13b: inputs must be positive");
  }
  const double bracket = a_plus / a_minus + a_minus / a_plus;
  Identity13b out;
  out.lhs = length * length / (a_plus * a_plus) + length * length / (a_minus * a_minus);
  out.mid = (length * length / (a_plus * a_minus)) * bracket;
  const double h = length * (1.0 / a_plus + 1.0 / a_minus);
  out.rhs = (h * length / (a_plus + a_minus)) * bracket;
  return out;
}

/// Zeroth-order coefficient of the heat-type equation for log h:
/// ((4 pi - h L) / A) (A+/A- + A-/A+).  Positive iff the Hamilton ratio
/// sits strictly below 4 pi.
inline double supersolution_sign(const ParallelLoopStats& stats, double area) {
  const double bracket = stats.A_plus / stats.A_minus + stats.A_minus / stats.A_plus;
  return ((4.0 * pi - stats.hamilton_ratio) / area) * bracket;
}

struct MonotonicityViolation {
  std::size_t index = 0;  // record index of the earlier state
  double t_before = 0.0, t_after = 0.0;
  double h_before = 0.0, h_after = 0.0;
};

/// Flags every consecutive record pair where the threshold gate held at the
/// earlier record yet h_sum_global dropped by more than tol * h.  Empty
/// result means the monotonicity claim survived this run.
inline std::vector<MonotonicityViolation> monotonicity_check(const FlowTrace& trace,
                                                             double tol) {
  if (trace.records.empty()) {
    throw std::invalid_argument("monotonicity_check: empty trace");
  }
  if (tol < 0.0) {
    throw std::invalid_argument("monotonicity_check: tol must be nonnegative");
  }
  std::vector<MonotonicityViolation> out;
  for (std::size_t k = 0; k + 1 < trace.records.size(); ++k) {
    const TraceRecord& a = trace.records[k];
    const TraceRecord& b = trace.records[k + 1];
    if (a.threshold_ok && b.h_sum_global < a.h_sum_global - tol * a.h_sum_global) {
      out.push_back({k, a.t, b.t, a.h_sum_global, b.h_sum_global});
    }
  }
  return out;
}

struct ConvergenceEstimate {
  bool exact = false;   // every residual vanished to rounding
  double order = 0.0;   // least-squares slope of log(sup) vs log(dtheta)
};

inline constexpr double exact_residual_floor = 1e-13;

/// Order estimate for a residual operator over a profile family evaluated
/// on successively doubled grids.
inline ConvergenceEstimate convergence_order(
    const std::function<ResidualReport(const SurfaceProfile&)>& residual_fn,
    const std::function<SurfaceProfile(int)>& family, const std::vector<int>& grids) {
  if (grids.size() < 2) {
    throw std::invalid_argument("convergence_order: need at least two grids");
  }
  for (std::size_t k = 0; k + 1 < grids.size(); ++k) {
    if (grids[k + 1] != 2 * grids[k]) {
      throw std::invalid_argument("convergence_order: each grid must double the last");
    }
  }
  std::vector<double> log_h, log_sup;
  for (int n : grids) {
    const SurfaceProfile p = family(n);
    const ResidualReport rep = residual_fn(p);
    if (rep.sup_norm <= exact_residual_floor) return {true, 0.0};
    log_h.push_back(std::log(pi / n));
    log_sup.push_back(std::log(rep.sup_norm));
  }
  const std::size_t m = log_h.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    sx += log_h[k];
    sy += log_sup[k];
    sxx += log_h[k] * log_h[k];
    sxy += log_h[k] * log_sup[k];
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return {false, slope};
}

}  // namespace cheeger_flow
