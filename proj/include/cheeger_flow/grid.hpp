#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace cheeger_flow {

inline constexpr double pi = std::numbers::pi;

/// Uniform grid on the polar angle theta in [0, pi].  Node 0 and node
/// n_intervals are the poles.
struct GridSpec {
  int n_intervals;

  explicit GridSpec(int n) : n_intervals(n) {
    if (n < 16) {
      throw std::invalid_argument("GridSpec: n_intervals must be >= 16, got " +
                                  std::to_string(n));
    }
  }

  int node_count() const { return n_intervals + 1; }
  double dtheta() const { return pi / n_intervals; }
  double theta(int i) const {
    return static_cast<double>(i) * pi / n_intervals;
  }
  bool is_pole(int i) const { return i == 0 || i == n_intervals; }
  bool is_interior(int i) const { return i > 0 && i < n_intervals; }
};

/// Rotationally symmetric metric on the 2-sphere, g = e^{2u} ghat, where
/// ghat is the round unit-sphere metric and u is sampled at the grid nodes.
/// `time` is flow time in area units per curvature unit.
struct SurfaceProfile {
  GridSpec grid;
  std::vector<double> u;
  double time = 0.0;
};

struct Violation {
  std::string invariant;
  int node = -1;  // -1 when the violation is not tied to a node
  std::string detail;
};

/// Tolerance for the one-sided derivative of u at a pole.  Scales with the
/// grid spacing so that smooth even profiles pass at any resolution while
/// O(1) slope defects are caught.
inline double pole_slope_tolerance(const GridSpec& g) {
  return 0.5 * g.dtheta();
}

/// Checks every SurfaceProfile invariant; empty report means valid.
inline std::vector<Violation> validate_profile(const SurfaceProfile& p) {
  std::vector<Violation> out;
  const int n = p.grid.n_intervals;
  if (static_cast<int>(p.u.size()) != n + 1) {
    out.push_back({"node_count", -1,
                   "u has " + std::to_string(p.u.size()) + " entries, grid needs " +
                       std::to_string(n + 1)});
    return out;  // indexing below would be unsafe
  }
  for (int i = 0; i <= n; ++i) {
    if (!std::isfinite(p.u[i])) {
      out.push_back({"finite", i, "u is not finite at node " + std::to_string(i)});
    }
  }
  if (!out.empty()) return out;
  if (!std::isfinite(p.time)) {
    out.push_back({"finite_time", -1, "flow time is not finite"});
  }
  // Pole regularity: one-sided second-order derivative of u must vanish.
  const double h = p.grid.dtheta();
  const double tol = pole_slope_tolerance(p.grid);
  const double d_north = (-3.0 * p.u[0] + 4.0 * p.u[1] - p.u[2]) / (2.0 * h);
  const double d_south = (3.0 * p.u[n] - 4.0 * p.u[n - 1] + p.u[n - 2]) / (2.0 * h);
  if (std::abs(d_north) > tol) {
    out.push_back({"pole_regularity", 0,
                   "one-sided du/dtheta = " + std::to_string(d_north) +
                       " at the north pole (tolerance " + std::to_string(tol) + ")"});
  }
  if (std::abs(d_south) > tol) {
    out.push_back({"pole_regularity", n,
                   "one-sided du/dtheta = " + std::to_string(d_south) +
                       " at the south pole (tolerance " + std::to_string(tol) + ")"});
  }
  return out;
}

/// Throws std::invalid_argument carrying the first violation.
inline void require_valid(const SurfaceProfile& p) {
  const auto report = validate_profile(p);
  if (!report.empty()) {
    throw std::invalid_argument("invalid SurfaceProfile: " + report.front().invariant +
                                " (" + report.front().detail + ")");
  }
}

inline void require_node_index(const SurfaceProfile& p, int i) {
  if (i < 0 || i > p.grid.n_intervals) {
    throw std::out_of_range("node index " + std::to_string(i) + " outside [0, " +
                            std::to_string(p.grid.n_intervals) + "]");
  }
}

inline void require_interior_index(const SurfaceProfile& p, int i) {
  require_node_index(p, i);
  if (p.grid.is_pole(i)) {
    throw std::out_of_range("node index " + std::to_string(i) +
                            " is a pole; operation needs an interior parallel");
  }
}

}  // namespace cheeger_flow
