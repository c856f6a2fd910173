#pragma once

#include <cmath>
#include <vector>

#include "cheeger_flow/grid.hpp"
#include "cheeger_flow/surface.hpp"

namespace cheeger_flow {

/// Isoperimetric data of one parallel loop.
///   h_sum = L (1/A_plus + 1/A_minus)      (sum-of-reciprocals form)
///   h_min = L / min(A_plus, A_minus)      (smaller-cap form)
///   hamilton_ratio = h_sum * L = L^2 (1/A_plus + 1/A_minus)
struct ParallelLoopStats {
  int node_index = -1;
  double theta = 0.0;
  double rho = 0.0;
  double L = 0.0;
  double A_plus = 0.0;
  double A_minus = 0.0;
  double gamma_total = 0.0;
  double h_sum = 0.0;
  double h_min = 0.0;
  double hamilton_ratio = 0.0;
};

namespace detail {

/// Everything loop computations need, assembled in one pass.
struct LoopTables {
  std::vector<double> caps;   // cumulative cap area, caps[n] = total
  std::vector<double> rho;    // meridian arclength
  double total = 0.0;
};

inline LoopTables loop_tables(const SurfaceProfile& p) {
  LoopTables t;
  t.caps = cap_area_prefix(p);
  t.total = t.caps.back();
  const int n = p.grid.n_intervals;
  const double h = p.grid.dtheta();
  t.rho.resize(n + 1);
  t.rho[0] = 0.0;
  for (int i = 0; i < n; ++i) {
    t.rho[i + 1] = t.rho[i] + 0.5 * h * (std::exp(p.u[i]) + std::exp(p.u[i + 1]));
  }
  return t;
}

inline double parallel_length(const SurfaceProfile& p, int i) {
  return 2.0 * pi * std::exp(p.u[i]) * std::sin(p.grid.theta(i));
}

/// Total geodesic curvature of the parallel at interior node i:
/// Gamma = 2 pi (cos(theta) + u_theta sin(theta)), centered u_theta.
inline double gamma_at(const SurfaceProfile& p, int i) {
  const double du = d1(p.u, i, p.grid.dtheta());
  const double th = p.grid.theta(i);
  return 2.0 * pi * (std::cos(th) + du * std::sin(th));
}

inline ParallelLoopStats stats_from_tables(const SurfaceProfile& p,
                                           const LoopTables& t, int i) {
  ParallelLoopStats s;
  s.node_index = i;
  s.theta = p.grid.theta(i);
  s.rho = t.rho[i];
  s.L = parallel_length(p, i);
  s.A_plus = t.caps[i];
  s.A_minus = t.total - t.caps[i];
  s.gamma_total = gamma_at(p, i);
  s.h_sum = s.L * (1.0 / s.A_plus + 1.0 / s.A_minus);
  s.h_min = s.L / std::min(s.A_plus, s.A_minus);
  s.hamilton_ratio = s.h_sum * s.L;
  return s;
}

}  // namespace detail

/// Full isoperimetric stats of the parallel at interior node i.
inline ParallelLoopStats loop_stats(const SurfaceProfile& p, int i) {
  require_valid(p);
  require_interior_index(p, i);
  return detail::stats_from_tables(p, detail::loop_tables(p), i);
}

/// Total geodesic curvature Gamma of the parallel at interior node i.
/// Equals dL/drho in the discrete calculus up to stencil error.
inline double gamma_geodesic(const SurfaceProfile& p, int i) {
  require_valid(p);
  require_interior_index(p, i);
  return detail::gamma_at(p, i);
}

struct GlobalCheeger {
  ParallelLoopStats stats;   // at the grid argmin of h_sum
  double refined_theta = 0.0;  // parabolic vertex estimate of the minimizer
};

/// Minimizer of h_sum over interior parallels.  Ties break toward smaller
/// theta.  refined_theta fits a parabola through the argmin and its two
/// neighbors; at the first or last interior node it falls back to the node
/// angle (a pole neighbor has no h value).
inline GlobalCheeger global_cheeger(const SurfaceProfile& p) {
  require_valid(p);
  const int n = p.grid.n_intervals;
  const auto tables = detail::loop_tables(p);
  int best = -1;
  double best_h = 0.0;
  std::vector<double> h(n + 1, 0.0);
  for (int i = 1; i < n; ++i) {
    const double L = detail::parallel_length(p, i);
    const double ap = tables.caps[i];
    const double am = tables.total - tables.caps[i];
    h[i] = L * (1.0 / ap + 1.0 / am);
    if (best < 0 || h[i] < best_h) {
      best = i;
      best_h = h[i];
    }
  }
  GlobalCheeger out;
  out.stats = detail::stats_from_tables(p, tables, best);
  out.refined_theta = out.stats.theta;
  if (best > 1 && best < n - 1) {
    const double denom = h[best + 1] - 2.0 * h[best] + h[best - 1];
    if (denom > 0.0) {
      const double offset = 0.5 * (h[best - 1] - h[best + 1]) / denom;
      out.refined_theta = out.stats.theta + offset * p.grid.dtheta();
    }
  }
  return out;
}

struct IsoperimetricBound {
  double bound = 0.0;         // 16 / sqrt(total area)
  double h_min_global = 0.0;  // min over interior parallels of h_min
  bool satisfied = false;
};

/// Area bound on the Cheeger constant: h_min_global <= 16/sqrt(A), checked
/// with relative slack `tol` on the right-hand side.
inline IsoperimetricBound papasoglu_bound(const SurfaceProfile& p, double tol = 1e-3) {
  require_valid(p);
  const int n = p.grid.n_intervals;
  const auto tables = detail::loop_tables(p);
  IsoperimetricBound out;
  out.bound = 16.0 / std::sqrt(tables.total);
  double best = std::numeric_limits<double>::infinity();
  for (int i = 1; i < n; ++i) {
    const double L = detail::parallel_length(p, i);
    const double ap = tables.caps[i];
    const double am = tables.total - tables.caps[i];
    best = std::min(best, L / std::min(ap, am));
  }
  out.h_min_global = best;
  out.satisfied = best <= out.bound * (1.0 + tol);
  return out;
}

}  // namespace cheeger_flow
