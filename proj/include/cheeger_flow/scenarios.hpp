#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cheeger_flow/grid.hpp"
#include "cheeger_flow/identities.hpp"
#include "cheeger_flow/loop_functionals.hpp"
#include "cheeger_flow/ricci_flow.hpp"
#include "cheeger_flow/surface.hpp"

namespace cheeger_flow {

/// Constant conformal factor log(r): the round sphere of radius r.
inline SurfaceProfile round_sphere(double r, int n) {
  if (!(r > 0.0)) {
    throw std::invalid_argument("round_sphere: radius must be positive, got " +
                                std::to_string(r));
  }
  SurfaceProfile p{GridSpec(n), std::vector<double>(n + 1, std::log(r)), 0.0};
  return p;
}

namespace detail {

/// Gaussian of width w centered at c, even-periodized over the sphere:
/// images at -c and at c, -c shifted by +-2pi make the profile exactly even
/// about both poles, so the pole-regularity invariant holds for every
/// amplitude and width in the documented ranges.
inline double mirrored_gaussian(double theta, double center, double w) {
  double acc = 0.0;
  for (int k = -1; k <= 1; ++k) {
    const double a = theta - center - 2.0 * pi * k;
    const double b = theta + center - 2.0 * pi * k;
    acc += std::exp(-a * a / (w * w)) + std::exp(-b * b / (w * w));
  }
  return acc;
}

/// Samples f on the northern half and reflects, so mirror symmetry holds
/// exactly in the stored values.
inline std::vector<double> mirror_sampled(const GridSpec& g,
                                          const std::function<double(double)>& f) {
  std::vector<double> u(g.node_count());
  for (int i = 0; i <= g.n_intervals; ++i) {
    const int j = std::min(i, g.n_intervals - i);
    u[i] = f(g.theta(j));
  }
  return u;
}

}  // namespace detail

/// Mirror-symmetric equatorial band: u(theta) = a * G(theta - pi/2) with G a
/// width-w Gaussian (pole-symmetrized).  a > 0 fattens the equator, a < 0
/// pinches it into a negatively curved neck.
inline SurfaceProfile bump_sphere(double a, double w, int n) {
  if (!(std::abs(a) <= 1.0)) {
    throw std::invalid_argument("bump_sphere: need |a| <= 1, got " + std::to_string(a));
  }
  if (!(w >= 0.1 && w <= 1.0)) {
    throw std::invalid_argument("bump_sphere: need w in [0.1, 1], got " +
                                std::to_string(w));
  }
  const GridSpec grid(n);
  auto f = [a, w](double th) {
    return a * detail::mirrored_gaussian(th, 0.5 * pi, w);
  };
  return SurfaceProfile{grid, detail::mirror_sampled(grid, f), 0.0};
}

/// Two symmetric fattened bands at pi/2 +- pi/6 (width w) over a depressed
/// equator (width w/2), all scaled by `neck`.  Caps stay positively curved,
/// the waist is negatively curved.  Documented ranges: neck in (0, 1),
/// w in [0.2, 0.8].
inline SurfaceProfile dumbbell(double neck, double w, int n) {
  if (!(neck > 0.0 && neck < 1.0)) {
    throw std::invalid_argument("dumbbell: need neck in (0, 1), got " +
                                std::to_string(neck));
  }
  if (!(w >= 0.2 && w <= 0.8)) {
    throw std::invalid_argument("dumbbell: need w in [0.2, 0.8], got " +
                                std::to_string(w));
  }
  const GridSpec grid(n);
  auto f = [neck, w](double th) {
    const double bumps = detail::mirrored_gaussian(th, pi / 2.0 - pi / 6.0, w) +
                         detail::mirrored_gaussian(th, pi / 2.0 + pi / 6.0, w);
    const double dip = detail::mirrored_gaussian(th, 0.5 * pi, 0.5 * w);
    return neck * (bumps - dip);
  };
  return SurfaceProfile{grid, detail::mirror_sampled(grid, f), 0.0};
}

/// Named initial data plus run parameters; the CLI's vocabulary.
struct ScenarioSpec {
  std::string name;                        // round_sphere | bump_sphere | dumbbell
  std::map<std::string, double> parameters;
  int grid_n = 256;
  StepControl control;
};

inline SurfaceProfile build_scenario(const ScenarioSpec& spec) {
  auto param = [&](const std::string& key, double fallback) {
    const auto it = spec.parameters.find(key);
    return it == spec.parameters.end() ? fallback : it->second;
  };
  if (spec.name == "round_sphere") return round_sphere(param("r", 1.0), spec.grid_n);
  if (spec.name == "bump_sphere") {
    return bump_sphere(param("a", 0.3), param("w", 0.5), spec.grid_n);
  }
  if (spec.name == "dumbbell") {
    return dumbbell(param("neck", 0.5), param("w", 0.4), spec.grid_n);
  }
  throw std::invalid_argument("unknown scenario '" + spec.name + "'");
}

// ---------------------------------------------------------------------------
// Stationarity-candidate search
// ---------------------------------------------------------------------------

/// One-parameter profile families for the stationarity root search.
///   round_sphere : param = radius
///   bump         : param = amplitude a at fixed w = 0.5
///   dumbbell     : param = neck at fixed w = 0.4
inline std::function<SurfaceProfile(double)> stationary_family(const std::string& name,
                                                               int n) {
  if (name == "round_sphere") {
    return [n](double r) { return round_sphere(r, n); };
  }
  if (name == "bump") {
    return [n](double a) { return bump_sphere(a, 0.5, n); };
  }
  if (name == "dumbbell") {
    return [n](double neck) { return dumbbell(neck, 0.4, n); };
  }
  throw std::invalid_argument("unknown stationary family '" + name + "'");
}

struct StationaryDiagnostics {
  double s_value = 0.0;            // L^2 - 4 pi A_plus at the returned param
  double s_lo = 0.0, s_hi = 0.0;   // endpoint values of the bracket
  double cap_imbalance = 0.0;      // A_plus - A_minus (0 by mirror symmetry)
  double gamma_equator = 0.0;
  double hamilton_min_ratio = 0.0;  // (L / min(A+, A-)) * L = L^2 / A_plus
  double hamilton_sum_ratio = 0.0;  // h_sum * L
  double supersolution = 0.0;       // zeroth-order heat term at the equator
};

struct StationarySearchResult {
  bool root_found = false;
  std::string status;  // "root" or "no sign change in range"
  double param = 0.0;
  std::optional<SurfaceProfile> profile;
  StationaryDiagnostics diagnostics;
};

inline constexpr double stationary_s_tolerance = 1e-10;  // relative to 4 pi

namespace detail {

/// The cut condition of the stationarity construction at the equator:
/// s = L^2 - 4 pi A_plus, whose root pins L = 2 sqrt(pi) sqrt(A_plus).
inline double stationary_gap(const SurfaceProfile& p) {
  const int eq = p.grid.n_intervals / 2;
  const double L = parallel_length(p, eq);
  const double ap = cap_area_prefix(p)[eq];
  return L * L - 4.0 * pi * ap;
}

}  // namespace detail

/// Bisection for the equatorial cut condition L^2 = 4 pi A_plus over one
/// registered family.  The grid must have an equator node (even n).  Reports
/// "no sign change in range" when the bracket does not straddle a root.
inline StationarySearchResult find_stationary_candidate(const std::string& family_name,
                                                        double param_lo, double param_hi,
                                                        int n) {
  if (n % 2 != 0) {
    throw std::invalid_argument("find_stationary_candidate: grid_n must be even");
  }
  if (!(param_lo < param_hi)) {
    throw std::invalid_argument("find_stationary_candidate: empty parameter range");
  }
  const auto family = stationary_family(family_name, n);

  StationarySearchResult out;
  const double tol = stationary_s_tolerance * 4.0 * pi;
  double lo = param_lo, hi = param_hi;
  double s_lo = detail::stationary_gap(family(lo));
  double s_hi = detail::stationary_gap(family(hi));
  out.diagnostics.s_lo = s_lo;
  out.diagnostics.s_hi = s_hi;

  double root = 0.0;
  bool found = false;
  if (std::abs(s_lo) <= tol) {
    root = lo;
    found = true;
  } else if (std::abs(s_hi) <= tol) {
    root = hi;
    found = true;
  } else if (s_lo * s_hi < 0.0) {
    for (int iter = 0; iter < 200; ++iter) {
      const double mid = 0.5 * (lo + hi);
      const double s_mid = detail::stationary_gap(family(mid));
      if (std::abs(s_mid) <= tol || 0.5 * (hi - lo) < 1e-15 * std::abs(mid) + 1e-300) {
        root = mid;
        found = true;
        break;
      }
      if ((s_mid < 0.0) == (s_lo < 0.0)) {
        lo = mid;
        s_lo = s_mid;
      } else {
        hi = mid;
      }
    }
    if (!found) root = 0.5 * (lo + hi), found = true;
  }

  if (!found) {
    out.root_found = false;
    out.status = "no sign change in range";
    return out;
  }

  out.root_found = true;
  out.status = "root";
  out.param = root;
  out.profile = family(root);
  const int eq = n / 2;
  const ParallelLoopStats stats = loop_stats(*out.profile, eq);
  out.diagnostics.s_value = detail::stationary_gap(*out.profile);
  out.diagnostics.cap_imbalance = stats.A_plus - stats.A_minus;
  out.diagnostics.gamma_equator = stats.gamma_total;
  out.diagnostics.hamilton_min_ratio = stats.h_min * stats.L;
  out.diagnostics.hamilton_sum_ratio = stats.hamilton_ratio;
  out.diagnostics.supersolution =
      supersolution_sign(stats, stats.A_plus + stats.A_minus);
  return out;
}

/// Times where |dh/dt| <= tol * h_sum_global along a trace.
inline std::vector<double> detect_stationarity(const FlowTrace& trace, double tol) {
  if (trace.records.size() < 3) {
    throw std::invalid_argument("detect_stationarity: need at least 3 records");
  }
  std::vector<double> out;
  for (const TraceRecord& r : trace.records) {
    if (std::abs(r.dh_dt) <= tol * r.h_sum_global) out.push_back(r.t);
  }
  return out;
}

}  // namespace cheeger_flow
