#pragma once

// Exact reference quantities for balls B_R in R^d.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include "shl/error.hpp"
#include "shl/special_functions.hpp"

namespace shl {

namespace detail {

inline void require_dimension(int d, const char* who) {
  if (d < 2) throw DomainError(std::string(who) + ": dimension must be >= 2, got " + std::to_string(d));
}

inline void require_radius(double R, const char* who) {
  if (!(R > 0.0) || !std::isfinite(R)) throw DomainError(std::string(who) + ": radius must be finite and > 0");
}

}  // namespace detail

/// Gamma(n/2) for a positive integer n, by recursion from Gamma(1) and Gamma(1/2).
inline double gamma_half_integer(int n) {
  if (n <= 0) throw DomainError("gamma_half_integer: argument must be positive");
  double g = (n % 2 == 0) ? 1.0 : std::sqrt(std::numbers::pi);
  for (int m = (n % 2 == 0) ? 2 : 1; m + 2 <= n; m += 2) g *= 0.5 * m;
  return g;
}

/// Volume of the unit ball, pi^{d/2} / Gamma(d/2 + 1).
inline double unit_ball_volume(int d) {
  detail::require_dimension(d, "unit_ball_volume");
  return std::pow(std::numbers::pi, 0.5 * d) / gamma_half_integer(d + 2);
}

inline double ball_volume(int d, double R) {
  detail::require_radius(R, "ball_volume");
  return unit_ball_volume(d) * std::pow(R, d);
}

/// P(B_R) = d omega_d R^{d-1}.
inline double surface_area(int d, double R) {
  detail::require_radius(R, "surface_area");
  return d * unit_ball_volume(d) * std::pow(R, d - 1);
}

/// E(B_R) = -P(B_1) R^{d+2} / (2 d^2 (d+2)), i.e. -1/2 of the integral of
/// the torsion function (R^2 - |x|^2)/(2d).
inline double dirichlet_energy_ball(int d, double R) {
  detail::require_radius(R, "dirichlet_energy_ball");
  return -surface_area(d, 1.0) / (2.0 * d * d * (d + 2.0)) * std::pow(R, d + 2);
}

/// First Dirichlet eigenvalue j_{d/2-1}^2 / R^2.
inline double lambda1_ball(int d, double R) {
  detail::require_dimension(d, "lambda1_ball");
  detail::require_radius(R, "lambda1_ball");
  const double j = first_zero(BesselOrder::for_dimension(d));
  return j * j / (R * R);
}

/// gamma_d^2 = 2 lambda_1(B_1) / P(B_1): squared normal derivative of the
/// normalised first eigenfunction on the unit sphere.
inline double gamma_sq(int d) { return 2.0 * lambda1_ball(d, 1.0) / surface_area(d, 1.0); }

namespace detail {

inline std::int64_t binomial(std::int64_t n, std::int64_t k) {
  if (n < 0 || k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t r = 1;
  for (std::int64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace detail

/// Dimension of the degree-k spherical harmonics on the sphere in R^d.
inline std::int64_t harmonic_dim(int d, int k) {
  detail::require_dimension(d, "harmonic_dim");
  if (k < 0) throw DomainError("harmonic_dim: mode must be >= 0");
  return detail::binomial(d + k - 1, k) - detail::binomial(d + k - 3, k - 2);
}

struct BallReference {
  int d = 2;
  double R = 1.0;
  double surface = 0.0;
  double volume = 0.0;
  double mean_curvature = 0.0;
  double lambda1 = 0.0;
  double energy = 0.0;
  double gamma_sq = 0.0;  // at R = 1
};

inline BallReference ball_reference(int d, double R) {
  detail::require_dimension(d, "ball_reference");
  detail::require_radius(R, "ball_reference");
  BallReference b;
  b.d = d;
  b.R = R;
  b.surface = surface_area(d, R);
  b.volume = ball_volume(d, R);
  b.mean_curvature = (d - 1) / R;
  b.lambda1 = lambda1_ball(d, R);
  b.energy = dirichlet_energy_ball(d, R);
  b.gamma_sq = gamma_sq(d);
  return b;
}

}  // namespace shl
