#pragma once

// Test-only oracles, kept independent of the implementation paths they
// check: closed-form round-sphere geometry, composite Simpson quadrature on
// analytic integrands, and the analytic scenario densities.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "cheeger_flow/grid.hpp"

namespace oracle {

inline constexpr double pi = cheeger_flow::pi;

/// Composite Simpson rule (n even).
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int k = 1; k < n; ++k) acc += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

// round sphere of radius r
inline double round_L(double r, double theta) { return 2.0 * pi * r * std::sin(theta); }
inline double round_cap(double r, double theta) {
  return 2.0 * pi * r * r * (1.0 - std::cos(theta));
}
inline double round_h_sum(double r, double theta) { return 2.0 / (r * std::sin(theta)); }
inline double round_gamma(double theta) { return 2.0 * pi * std::cos(theta); }

/// h_sum along the shrinking unit round sphere.
inline double round_h_of_t(double t) { return 2.0 / std::sqrt(1.0 - 2.0 * t); }

/// The even-periodized Gaussian used by the scenario constructors, written
/// out independently for the quadrature oracles.
inline double mirrored_gaussian(double theta, double center, double w) {
  double acc = 0.0;
  for (int k = -1; k <= 1; ++k) {
    const double a = theta - center - 2.0 * pi * k;
    const double b = theta + center - 2.0 * pi * k;
    acc += std::exp(-a * a / (w * w)) + std::exp(-b * b / (w * w));
  }
  return acc;
}

inline double bump_u(double a, double w, double theta) {
  return a * mirrored_gaussian(theta, 0.5 * pi, w);
}

inline double dumbbell_u(double neck, double w, double theta) {
  const double bumps = mirrored_gaussian(theta, pi / 2.0 - pi / 6.0, w) +
                       mirrored_gaussian(theta, pi / 2.0 + pi / 6.0, w);
  return neck * (bumps - mirrored_gaussian(theta, 0.5 * pi, 0.5 * w));
}

/// High-resolution area oracle: 2 pi * Simpson of e^{2u} sin(theta).
inline double area_of(const std::function<double(double)>& u, int n = 1 << 15) {
  return 2.0 * pi *
         simpson([&](double th) { return std::exp(2.0 * u(th)) * std::sin(th); }, 0.0,
                 pi, n);
}

/// Random pole-regular profiles: low-order polynomials in cos(theta) with
/// seeded coefficients (smooth on the sphere, so every invariant applies).
inline cheeger_flow::SurfaceProfile random_profile(std::mt19937_64& rng, int n,
                                                   double scale = 0.2,
                                                   bool mirror_symmetric = false) {
  auto unif = [&rng]() {
    return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
  };
  std::vector<double> c(5);
  for (double& v : c) v = scale * unif();
  cheeger_flow::SurfaceProfile p{cheeger_flow::GridSpec(n), std::vector<double>(n + 1),
                                 0.0};
  for (int i = 0; i <= n; ++i) {
    const double x = std::cos(p.grid.theta(i));
    double u = 0.0;
    double xk = 1.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
      const bool odd = k % 2 == 1;
      if (!(mirror_symmetric && odd)) u += c[k] * xk;
      xk *= x;
    }
    p.u[i] = u;
  }
  return p;
}

}  // namespace oracle
