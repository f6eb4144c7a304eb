#pragma once

// Star-shaped normal-graph perturbations of the unit disk,
//   r(theta) = 1 + h(theta),  h = a0 + sum_k a_k cos k theta + b_k sin k theta.
// On the unit circle the outward normal is radial, so the normal graph
// x + h(x) n(x) is exactly this radial graph.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "shl/error.hpp"

namespace shl {

class BoundaryPerturbation {
 public:
  BoundaryPerturbation() = default;

  BoundaryPerturbation(double a0, std::vector<double> cos_coeffs, std::vector<double> sin_coeffs)
      : a0_(a0), cos_(std::move(cos_coeffs)), sin_(std::move(sin_coeffs)) {
    const std::size_t K = std::max(cos_.size(), sin_.size());
    cos_.resize(K, 0.0);
    sin_.resize(K, 0.0);
    for (double v : cos_) check_finite(v);
    for (double v : sin_) check_finite(v);
    check_finite(a0_);
  }

  static BoundaryPerturbation constant(double a0) { return {a0, {}, {}}; }

  /// amplitude * cos(k theta) (or sin when use_sin).
  static BoundaryPerturbation mode(int k, double amplitude, bool use_sin = false) {
    if (k < 0) throw DomainError("BoundaryPerturbation::mode: k must be >= 0");
    if (k == 0) return constant(amplitude);
    std::vector<double> c(static_cast<std::size_t>(k), 0.0);
    std::vector<double> s(static_cast<std::size_t>(k), 0.0);
    (use_sin ? s : c)[static_cast<std::size_t>(k) - 1] = amplitude;
    return {0.0, std::move(c), std::move(s)};
  }

  double a0() const noexcept { return a0_; }
  const std::vector<double>& cos_coeffs() const noexcept { return cos_; }
  const std::vector<double>& sin_coeffs() const noexcept { return sin_; }
  int modes() const noexcept { return static_cast<int>(cos_.size()); }

  /// Cosine / sine coefficient of mode k >= 1 (zero past the truncation).
  double a(int k) const { return k >= 1 && k <= modes() ? cos_[static_cast<std::size_t>(k) - 1] : 0.0; }
  double b(int k) const { return k >= 1 && k <= modes() ? sin_[static_cast<std::size_t>(k) - 1] : 0.0; }

  double operator()(double theta) const {
    double v = a0_;
    for (int k = 1; k <= modes(); ++k) v += a(k) * std::cos(k * theta) + b(k) * std::sin(k * theta);
    return v;
  }

  double derivative(double theta) const {
    double v = 0.0;
    for (int k = 1; k <= modes(); ++k) v += k * (b(k) * std::cos(k * theta) - a(k) * std::sin(k * theta));
    return v;
  }

  double radius(double theta) const { return 1.0 + (*this)(theta); }

  /// Per-mode squared-coefficient mass in the L^2(circle)-orthonormal basis:
  /// rho_0 = 2 pi a0^2, rho_k = pi (a_k^2 + b_k^2).
  double mode_mass(int k) const {
    if (k == 0) return 2.0 * std::numbers::pi * a0_ * a0_;
    return std::numbers::pi * (a(k) * a(k) + b(k) * b(k));
  }

  /// sum_k |a_k| + |b_k|, an upper bound for max |h - a0|.
  double coefficient_sum() const {
    double s = 0.0;
    for (int k = 1; k <= modes(); ++k) s += std::abs(a(k)) + std::abs(b(k));
    return s;
  }

  /// Upper bound for max |h|.
  double sup_bound() const { return std::abs(a0_) + coefficient_sum(); }

  /// Star-shape certificate: min_theta (1 + h) > 0. The coefficient-sum
  /// condition is sufficient; otherwise a grid minimum is used together with
  /// a Lipschitz bound on h between grid points.
  bool is_star_shaped() const {
    if (coefficient_sum() < 1.0 + a0_) return true;
    const int n = std::max(4 * modes(), 256);
    double lip = 0.0;
    for (int k = 1; k <= modes(); ++k) lip += k * (std::abs(a(k)) + std::abs(b(k)));
    double lo = radius(0.0);
    for (int i = 1; i < n; ++i) lo = std::min(lo, radius(2.0 * std::numbers::pi * i / n));
    return lo - lip * std::numbers::pi / n > 0.0;
  }

  void require_star_shaped(const char* who) const {
    if (!is_star_shaped()) throw InvalidDomain(std::string(who) + ": perturbation fails the star-shape certificate");
  }

  /// Coefficient-wise scaling, h -> t h.
  BoundaryPerturbation scaled(double t) const {
    std::vector<double> c = cos_, s = sin_;
    for (double& v : c) v *= t;
    for (double& v : s) v *= t;
    return {t * a0_, std::move(c), std::move(s)};
  }

  BoundaryPerturbation operator+(const BoundaryPerturbation& o) const {
    const int K = std::max(modes(), o.modes());
    std::vector<double> c(static_cast<std::size_t>(K)), s(static_cast<std::size_t>(K));
    for (int k = 1; k <= K; ++k) {
      c[static_cast<std::size_t>(k) - 1] = a(k) + o.a(k);
      s[static_cast<std::size_t>(k) - 1] = b(k) + o.b(k);
    }
    return {a0_ + o.a0_, std::move(c), std::move(s)};
  }

  bool operator==(const BoundaryPerturbation&) const = default;

 private:
  static void check_finite(double v) {
    if (!std::isfinite(v)) throw DomainError("BoundaryPerturbation: coefficients must be finite");
  }

  double a0_ = 0.0;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

/// Area pi [(1+a0)^2 + 1/2 sum_k (a_k^2 + b_k^2)], exact from the coefficients.
inline double volume(const BoundaryPerturbation& h) {
  h.require_star_shaped("volume");
  double s = (1.0 + h.a0()) * (1.0 + h.a0());
  for (int k = 1; k <= h.modes(); ++k) s += 0.5 * (h.a(k) * h.a(k) + h.b(k) * h.b(k));
  return std::numbers::pi * s;
}

/// Arc length of r = 1 + h(theta). Periodic trapezoid, doubled until two
/// successive values agree to 1e-12 relative.
inline double perimeter(const BoundaryPerturbation& h) {
  h.require_star_shaped("perimeter");
  auto trapezoid = [&h](int n) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double theta = 2.0 * std::numbers::pi * i / n;
      const double r = h.radius(theta);
      const double dr = h.derivative(theta);
      sum += std::sqrt(r * r + dr * dr);
    }
    return 2.0 * std::numbers::pi * sum / n;
  };
  int n = std::max(64, 8 * h.modes());
  double prev = trapezoid(n);
  for (int iter = 0; iter < 16; ++iter) {
    n *= 2;
    const double next = trapezoid(n);
    if (std::abs(next - prev) < 1e-12 * std::abs(next)) return next;
    prev = next;
  }
  throw ConvergenceError("perimeter: trapezoid refinement did not converge", prev, prev);
}

/// ||h||_{H^s} = sqrt(sum_k (1 + k^2)^s rho_k).
inline double sobolev_norm(const BoundaryPerturbation& h, double s) {
  double sum = 0.0;
  for (int k = 0; k <= h.modes(); ++k) sum += std::pow(1.0 + double(k) * k, s) * h.mode_mass(k);
  return std::sqrt(sum);
}

/// Dilation about the origin, 1 + h' = mu (1 + h), with mu chosen so the
/// area equals target.
inline BoundaryPerturbation rescale_to_volume(const BoundaryPerturbation& h, double target) {
  if (!(target > 0.0)) throw DomainError("rescale_to_volume: target volume must be > 0");
  const double mu = std::sqrt(target / volume(h));
  BoundaryPerturbation scaled = h.scaled(mu);
  return {mu * (1.0 + h.a0()) - 1.0, scaled.cos_coeffs(), scaled.sin_coeffs()};
}

/// The path t -> Omega_t with boundary x + t h(x) n(x), t in [0, 1].
class DeformationPath {
 public:
  DeformationPath(BoundaryPerturbation h, double t) : h_(std::move(h)), t_(t) {
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("DeformationPath: t must lie in [0, 1]");
    // 1 + t h is a convex combination of 1 and 1 + h, so the end point suffices.
    h_.require_star_shaped("DeformationPath");
  }

  const BoundaryPerturbation& direction() const noexcept { return h_; }
  double t() const noexcept { return t_; }

 private:
  BoundaryPerturbation h_;
  double t_;
};

inline BoundaryPerturbation path_domain(const DeformationPath& path) { return path.direction().scaled(path.t()); }

}  // namespace shl
