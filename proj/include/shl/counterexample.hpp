#pragma once

// Concentric annuli B_1 \ B_eps rescaled to the volume of B_1:
//   Omega~_eps = mu_eps (B_1 \ B_eps),  mu_eps = (1 - eps^d)^{-1/d}.
// For gamma < 0 the energy gain beats the perimeter cost as eps -> 0, so
// P + gamma E is not minimal at the ball among L^1-close domains.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "shl/ball_reference.hpp"
#include "shl/error.hpp"
#include "shl/parallel.hpp"
#include "shl/pde_oracle.hpp"

namespace shl {

struct AnnulusRow {
  double eps = 0.0;
  double mu = 0.0;
  double dP = 0.0;       // P(Omega~) - P(B_1)
  double dE = 0.0;       // E(Omega~) - E(B_1)
  double deficit = 0.0;  // dP + gamma dE
  double l1_distance = 0.0;  // |Omega~ \Delta B_1|
};

struct AnnulusExperiment {
  int d = 3;
  double gamma = 0.0;
  std::vector<double> eps_grid;
  std::vector<AnnulusRow> rows;
  std::optional<double> crossover;  // largest grid eps with a negative deficit
  int sign_changes = 0;
  double ball_volume = 0.0;
  // Printed energy bracket versus quadrature at the smallest grid eps.
  AnnulusEnergy bracket_check;
};

/// P(Omega~_eps) - P(B_1) = [mu^{d-1} (1 + eps^{d-1}) - 1] P(B_1), without cancellation.
inline double annulus_perimeter_gap(int d, double eps) {
  detail::require_annulus(d, eps);
  const double dd = d;
  const double ed = std::pow(eps, d);
  const double rel = std::expm1(-(dd - 1.0) / dd * std::log1p(-ed) + std::log1p(std::pow(eps, d - 1)));
  return rel * surface_area(d, 1.0);
}

/// E(mu (B_1 \ B_eps)) - E(B_1) = mu^{d+2} defect + (mu^{d+2} - 1) E(B_1).
inline double annulus_energy_gap(int d, double eps) {
  detail::require_annulus(d, eps);
  const double dd = d;
  const double growth = std::expm1(-(dd + 2.0) / dd * std::log1p(-std::pow(eps, d)));
  return (1.0 + growth) * annulus_energy_defect(d, eps) + growth * dirichlet_energy_ball(d, 1.0);
}

/// |Omega~ \Delta B_1| = |B_mu| - |B_1| + |B_{mu eps}| = 2 omega_d eps^d / (1 - eps^d).
inline double annulus_l1_distance(int d, double eps) {
  detail::require_annulus(d, eps);
  const double ed = std::pow(eps, d);
  return 2.0 * unit_ball_volume(d) * ed / (1.0 - ed);
}

inline AnnulusExperiment run_annulus_experiment(int d, double gamma, std::vector<double> eps_grid) {
  detail::require_dimension(d, "run_annulus_experiment");
  if (!std::isfinite(gamma)) throw DomainError("run_annulus_experiment: gamma must be finite");
  if (eps_grid.empty()) throw DomainError("run_annulus_experiment: empty eps grid");
  for (double e : eps_grid) {
    if (!(e > 0.0 && e <= 0.5)) throw DomainError("run_annulus_experiment: eps values must lie in (0, 0.5]");
  }
  std::sort(eps_grid.begin(), eps_grid.end(), std::greater<>());
  AnnulusExperiment ex;
  ex.d = d;
  ex.gamma = gamma;
  ex.eps_grid = eps_grid;
  ex.ball_volume = unit_ball_volume(d);
  ex.rows = parallel_map<AnnulusRow>(eps_grid.size(), [&](std::size_t i) {
    AnnulusRow r;
    r.eps = eps_grid[i];
    r.mu = std::pow(1.0 - std::pow(r.eps, d), -1.0 / d);
    r.dP = annulus_perimeter_gap(d, r.eps);
    r.dE = annulus_energy_gap(d, r.eps);
    r.deficit = r.dP + gamma * r.dE;
    r.l1_distance = annulus_l1_distance(d, r.eps);
    return r;
  });
  for (std::size_t i = 0; i < ex.rows.size(); ++i) {
    if (!ex.crossover && ex.rows[i].deficit < 0.0) ex.crossover = ex.rows[i].eps;
    if (i > 0 && (ex.rows[i].deficit < 0.0) != (ex.rows[i - 1].deficit < 0.0)) ++ex.sign_changes;
  }
  ex.bracket_check = annulus_energy(d, eps_grid.back());
  return ex;
}

/// Geometric grid from eps_max down to eps_min with n points per decade.
inline std::vector<double> log_grid(double eps_max, double eps_min, int per_decade) {
  if (!(eps_min > 0.0 && eps_min < eps_max) || per_decade < 1) throw DomainError("log_grid: bad range");
  std::vector<double> g;
  const double lmax = std::log10(eps_max);
  const int n = static_cast<int>(std::ceil((lmax - std::log10(eps_min)) * per_decade));
  for (int i = 0; i <= n; ++i) g.push_back(std::pow(10.0, lmax - double(i) / per_decade));
  g.back() = std::max(g.back(), eps_min);
  return g;
}

struct AsymptoticSlopes {
  double p_order = 0.0;  // log2 dP(2 eps) / dP(eps)
  double e_order = 0.0;  // log2 dE(2 eps) / dE(eps)
  // d = 2: |measured dE ratio / (log eps / log 2eps) - 1|, the 1/|log eps| model.
  double log_model_residual = 0.0;
  double p_constant = 0.0;  // dP / (eps^{d-1} P(B_1))
  double e_constant = 0.0;  // dE / (eps^{d-2} P(B_1)) for d >= 3, dE |log eps| / P(B_1) for d = 2
};

inline AsymptoticSlopes asymptotic_slopes(int d, double eps) {
  detail::require_annulus(d, eps);
  detail::require_annulus(d, 2.0 * eps);
  AsymptoticSlopes s;
  const double p1 = surface_area(d, 1.0);
  const double dp1 = annulus_perimeter_gap(d, eps), dp2 = annulus_perimeter_gap(d, 2.0 * eps);
  const double de1 = annulus_energy_gap(d, eps), de2 = annulus_energy_gap(d, 2.0 * eps);
  s.p_order = std::log2(dp2 / dp1);
  s.e_order = std::log2(de2 / de1);
  s.p_constant = dp1 / (std::pow(eps, d - 1) * p1);
  if (d == 2) {
    const double model = std::log(eps) / std::log(2.0 * eps);
    s.log_model_residual = std::abs((de2 / de1) / model - 1.0);
    s.e_constant = de1 * std::abs(std::log(eps)) / p1;
  } else {
    s.e_constant = de1 / (std::pow(eps, d - 2) * p1);
  }
  return s;
}

}  // namespace shl
