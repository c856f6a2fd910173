#pragma once

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "cheeger_flow/grid.hpp"

namespace cheeger_flow {

namespace detail {

/// Centered first derivative in theta at an interior node.
inline double d1(const std::vector<double>& f, int i, double h) {
  return (f[i + 1] - f[i - 1]) / (2.0 * h);
}

/// Centered second derivative in theta at an interior node.
inline double d2(const std::vector<double>& f, int i, double h) {
  return (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h * h);
}

/// Per-interval weights (a_k, b_k) such that
///   integral over [theta_k, theta_{k+1}] of f(theta) sin(theta) dtheta
///     ~= a_k f_k + b_k f_{k+1},
/// exact whenever f is linear on the interval.  The sin factor (the area
/// Jacobian, degenerate at the poles) is integrated in closed form:
///   a_k = cos(theta_k)     - (sin(theta_{k+1}) - sin(theta_k)) / dtheta
///   b_k = (sin(theta_{k+1}) - sin(theta_k)) / dtheta - cos(theta_{k+1})
/// Both weights are positive, and a_k + b_k = cos(theta_k) - cos(theta_{k+1}).
struct SinWeights {
  std::vector<double> a, b;
};

inline SinWeights sin_segment_weights(const GridSpec& g) {
  const int n = g.n_intervals;
  SinWeights w;
  w.a.resize(n);
  w.b.resize(n);
  const double h = g.dtheta();
  for (int k = 0; k < n; ++k) {
    const double t0 = g.theta(k);
    const double t1 = g.theta(k + 1);
    // sin(t1) - sin(t0) in product form, stable near the poles
    const double ds = 2.0 * std::cos(0.5 * (t0 + t1)) * std::sin(0.5 * h);
    w.a[k] = std::cos(t0) - ds / h;
    w.b[k] = ds / h - std::cos(t1);
  }
  return w;
}

/// Discrete Laplace-Beltrami of u w.r.t. the round unit sphere at node i,
/// flux form: (1/sin)(sin u_theta)_theta.  Poles use the removable limit
/// 2 u_thetatheta with ghost-node reflection, i.e. 4 (u_1 - u_0) / h^2.
inline double laplace_hat(const SurfaceProfile& p, int i) {
  const int n = p.grid.n_intervals;
  const double h = p.grid.dtheta();
  if (i == 0) return 4.0 * (p.u[1] - p.u[0]) / (h * h);
  if (i == n) return 4.0 * (p.u[n - 1] - p.u[n]) / (h * h);
  const double sp = std::sin(p.grid.theta(i) + 0.5 * h);
  const double sm = std::sin(p.grid.theta(i) - 0.5 * h);
  const double flux = sp * (p.u[i + 1] - p.u[i]) - sm * (p.u[i] - p.u[i - 1]);
  return flux / (std::sin(p.grid.theta(i)) * h * h);
}

}  // namespace detail

/// Gaussian curvature K = e^{-2u} (1 - laplace_hat u) at every node.
inline std::vector<double> gaussian_curvature(const SurfaceProfile& p) {
  require_valid(p);
  const int n = p.grid.n_intervals;
  std::vector<double> k(n + 1);
  for (int i = 0; i <= n; ++i) {
    k[i] = std::exp(-2.0 * p.u[i]) * (1.0 - detail::laplace_hat(p, i));
  }
  return k;
}

/// Length of the parallel at node i: L = 2 pi e^{u} sin(theta).
/// Exactly zero at the poles.
inline double circumference(const SurfaceProfile& p, int i) {
  require_valid(p);
  require_node_index(p, i);
  if (p.grid.is_pole(i)) return 0.0;
  return 2.0 * pi * std::exp(p.u[i]) * std::sin(p.grid.theta(i));
}

/// Meridian arclength rho(theta_i) = integral of e^u from 0 to theta_i,
/// composite trapezoid (order 2).  Strictly increasing, rho_0 = 0.
inline std::vector<double> arclength(const SurfaceProfile& p) {
  require_valid(p);
  const int n = p.grid.n_intervals;
  const double h = p.grid.dtheta();
  std::vector<double> rho(n + 1);
  rho[0] = 0.0;
  for (int i = 0; i < n; ++i) {
    rho[i + 1] = rho[i] + 0.5 * h * (std::exp(p.u[i]) + std::exp(p.u[i + 1]));
  }
  return rho;
}

namespace detail {

/// Cumulative cap areas: caps[i] = area of {theta <= theta_i}.
/// caps[n] is the total area.
inline std::vector<double> cap_area_prefix(const SurfaceProfile& p) {
  const int n = p.grid.n_intervals;
  const SinWeights w = sin_segment_weights(p.grid);
  std::vector<double> caps(n + 1);
  caps[0] = 0.0;
  for (int k = 0; k < n; ++k) {
    const double f0 = std::exp(2.0 * p.u[k]);
    const double f1 = std::exp(2.0 * p.u[k + 1]);
    caps[k + 1] = caps[k] + 2.0 * pi * (w.a[k] * f0 + w.b[k] * f1);
  }
  return caps;
}

}  // namespace detail

/// Areas of the two caps cut by the parallel at interior node i.
/// A_minus is defined as total minus A_plus, so they sum exactly.
inline std::pair<double, double> cap_areas(const SurfaceProfile& p, int i) {
  require_valid(p);
  require_interior_index(p, i);
  const auto caps = detail::cap_area_prefix(p);
  const double total = caps[p.grid.n_intervals];
  return {caps[i], total - caps[i]};
}

/// Total surface area, 2 pi * integral of e^{2u} sin(theta) dtheta.
inline double total_area(const SurfaceProfile& p) {
  require_valid(p);
  return detail::cap_area_prefix(p).back();
}

/// Integral of a nodal quantity against the area element,
/// 2 pi * integral of f(theta) e^{2u} sin(theta) dtheta.
inline double integrate_dA(const SurfaceProfile& p, std::span<const double> f) {
  require_valid(p);
  if (static_cast<int>(f.size()) != p.grid.node_count()) {
    throw std::invalid_argument("integrate_dA: nodal array size mismatch");
  }
  const int n = p.grid.n_intervals;
  const detail::SinWeights w = detail::sin_segment_weights(p.grid);
  double acc = 0.0;
  for (int k = 0; k < n; ++k) {
    acc += w.a[k] * f[k] * std::exp(2.0 * p.u[k]) +
           w.b[k] * f[k + 1] * std::exp(2.0 * p.u[k + 1]);
  }
  return 2.0 * pi * acc;
}

}  // namespace cheeger_flow
