#pragma once

// Stability thresholds of the four combined functionals at the unit ball,
// positivity and coercivity of diagonal quadratic forms, and the minimal
// exact-penalisation weight.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shl/ball_reference.hpp"
#include "shl/error.hpp"
#include "shl/spectra.hpp"

namespace shl {

/// The four families J + t G:
///   PE: P + t E,  PL: P + t lambda1,  EL: E + t lambda1,  LE: lambda1 + t E.
enum class Pair { PE, PL, EL, LE };

inline std::string_view to_string(Pair p) {
  switch (p) {
    case Pair::PE: return "PE";
    case Pair::PL: return "PL";
    case Pair::EL: return "EL";
    case Pair::LE: return "LE";
  }
  return "?";
}

inline Pair parse_pair(std::string_view s) {
  if (s == "PE") return Pair::PE;
  if (s == "PL") return Pair::PL;
  if (s == "EL") return Pair::EL;
  if (s == "LE") return Pair::LE;
  throw DomainError("unknown pair '" + std::string(s) + "' (expected PE, PL, EL or LE)");
}

inline FunctionalCombo pair_combo(Pair p, double t) {
  switch (p) {
    case Pair::PE: return {{Functional::P, 1.0}, {Functional::E, t}};
    case Pair::PL: return {{Functional::P, 1.0}, {Functional::Lambda1, t}};
    case Pair::EL: return {{Functional::E, 1.0}, {Functional::Lambda1, t}};
    case Pair::LE: return {{Functional::Lambda1, 1.0}, {Functional::E, t}};
  }
  throw DomainError("pair_combo: bad pair");
}

inline QuadraticFormSpectrum lagrangian_family(Pair p, double t, int d, int K,
                                               Lambda1Form form = Lambda1Form::Verified) {
  return lagrangian_spectrum(pair_combo(p, t), d, K, MultiplierConvention::Add, form);
}

/// Sobolev exponents (s1, s2) of the structural hypotheses.
struct SobolevIndexPair {
  double s1 = 0.0;
  double s2 = 1.0;

  SobolevIndexPair(double lo, double hi) : s1(lo), s2(hi) {
    if (!(0.0 <= s1 && s1 < s2 && s2 <= 1.0)) throw DomainError("SobolevIndexPair: need 0 <= s1 < s2 <= 1");
  }
};

/// P lives in H^1, E and lambda1 in H^{1/2}.
inline SobolevIndexPair natural_indices(Functional f) {
  switch (f) {
    case Functional::P: return {0.0, 1.0};
    case Functional::E:
    case Functional::Lambda1: return {0.0, 0.5};
    case Functional::Vol: break;
  }
  throw DomainError("natural_indices: Vol has no two-norm structure");
}

inline SobolevIndexPair natural_indices(Pair p) {
  return (p == Pair::PE || p == Pair::PL) ? SobolevIndexPair{0.0, 1.0} : SobolevIndexPair{0.0, 0.5};
}

/// Largest s2 over the terms of a combination.
inline double natural_s2(const FunctionalCombo& combo) {
  double s2 = 0.0;
  for (const Term& t : combo.terms()) {
    if (t.coefficient != 0.0 && t.tag != Functional::Vol) s2 = std::max(s2, natural_indices(t.tag).s2);
  }
  return s2;
}

struct ThresholdReport {
  Pair pair = Pair::PE;
  int d = 2;
  int K = 0;
  Lambda1Form form = Lambda1Form::Verified;
  std::vector<double> tau;  // tau[k - 2], k = 2..K
  double sup_tau = 0.0;     // max over the scanned modes
  int argmax_k = 2;
  std::optional<double> closed_form;
  std::string closed_form_kind;  // "optimal" or "sufficient bound, not claimed optimal"
  bool agrees_with_closed_form = false;
  double rel_gap = 0.0;  // |sup_tau - closed_form| / |closed_form|
  // Limit of tau_k as k -> infinity (-inf when tau_k decreases without bound).
  double tail_limit = -std::numeric_limits<double>::infinity();
  // Supremum over all k >= 2 once the tail limit is taken into account.
  double sup_all_modes = 0.0;
  bool tail_certified = false;

  double tau_at(int k) const { return tau.at(static_cast<std::size_t>(k) - 2); }
};

inline constexpr double kClosedFormAgreement = 1e-6;

/// Printed closed-form constant for each family.
inline double closed_form_threshold(Pair p, int d) {
  const double dd = d;
  const double g2 = gamma_sq(d);
  switch (p) {
    case Pair::PE: return -(dd + 1.0) * dd * dd;
    case Pair::PL: {
      const double j = first_zero(BesselOrder::for_dimension(d));
      return -dd * (dd + 1.0) / (g2 * (dd + j * j));
    }
    case Pair::EL: return -1.0 / (dd * dd * (dd + 1.0) * g2);
    case Pair::LE: return -g2 * dd * dd;
  }
  return 0.0;
}

/// Per-mode critical values tau_k: c_k(t) > 0 iff t > tau_k, for k = 2..K.
/// c_k(t) is affine in t, so tau_k = -c_k(0) / (c_k(1) - c_k(0)).
inline ThresholdReport threshold(Pair p, int d, int K, Lambda1Form form = Lambda1Form::Verified) {
  detail::require_dimension(d, "threshold");
  if (K < 10) throw DomainError("threshold: K must be >= 10");
  const QuadraticFormSpectrum base = lagrangian_family(p, 0.0, d, K, form);
  const QuadraticFormSpectrum unit = lagrangian_family(p, 1.0, d, K, form);

  ThresholdReport r;
  r.form = form;
  r.pair = p;
  r.d = d;
  r.K = K;
  r.tau.reserve(static_cast<std::size_t>(K) - 1);
  r.sup_tau = -std::numeric_limits<double>::infinity();
  for (int k = 2; k <= K; ++k) {
    const double slope = unit.at(k) - base.at(k);
    if (!(slope > 1e-14 * std::max(1.0, std::abs(base.at(k))))) {
      throw DegenerateCoefficient("threshold: c_" + std::to_string(k) + "(t) is not increasing in t for " +
                                  std::string(to_string(p)));
    }
    const double tau = -base.at(k) / slope;
    r.tau.push_back(tau);
    if (tau > r.sup_tau) {
      r.sup_tau = tau;
      r.argmax_k = k;
    }
  }

  const double dd = d;
  // Linear growth of the lambda1 spectrum: gamma^2 or 2 gamma^2 by form.
  const double g = raw_spectrum(Functional::Lambda1, d, 2, form).growth_linear;
  r.closed_form = closed_form_threshold(p, d);
  const bool optimal = (p == Pair::PE || p == Pair::PL);
  r.closed_form_kind = optimal ? "optimal" : "sufficient bound, not claimed optimal";
  switch (p) {
    case Pair::PE:
    case Pair::PL: r.tail_limit = -std::numeric_limits<double>::infinity(); break;
    case Pair::EL: r.tail_limit = -1.0 / (dd * dd * g); break;
    case Pair::LE: r.tail_limit = -g * dd * dd; break;
  }
  const double last = r.tau_at(K);
  const double before = r.tau_at(K - 1);
  if (optimal) {
    r.tail_certified = last < before && r.argmax_k < K;
    r.sup_all_modes = r.sup_tau;
  } else if (last > before) {
    // Increasing towards the limit: the tail supremum is the limit itself.
    r.tail_certified = last <= r.tail_limit;
    r.sup_all_modes = std::max(r.sup_tau, r.tail_limit);
  } else {
    // Decreasing towards the limit: the scanned maximum already dominates.
    r.tail_certified = last >= r.tail_limit;
    r.sup_all_modes = r.sup_tau;
  }
  const double cf = *r.closed_form;
  r.rel_gap = std::abs(r.sup_tau - cf) / std::abs(cf);
  r.agrees_with_closed_form = optimal ? r.rel_gap <= kClosedFormAgreement
                                : r.sup_all_modes <= cf + kClosedFormAgreement * std::abs(cf);
  return r;
}

enum class Subspace { AllModes, TangentModes };

inline std::string_view to_string(Subspace s) { return s == Subspace::AllModes ? "all_modes" : "tangent_modes"; }

namespace detail {

inline int first_mode(Subspace s) { return s == Subspace::AllModes ? 0 : 2; }

/// c_K >= c_{K-1} > 0 and non-negative leading growth.
inline bool tail_certificate(const QuadraticFormSpectrum& s) {
  const double cK = s.at(s.K);
  const double cK1 = s.at(s.K - 1);
  const bool growth_ok = s.growth_quadratic > 0.0 || (s.growth_quadratic == 0.0 && s.growth_linear >= 0.0);
  return growth_ok && cK >= cK1 && cK1 > 0.0;
}

}  // namespace detail

/// True iff c_k > 0 for every mode of the subspace. When all scanned modes
/// are positive the tail beyond K must also be certified.
inline bool positivity_check(const QuadraticFormSpectrum& s, Subspace sub) {
  if (s.K < 2) throw DomainError("positivity_check: truncation K must be >= 2");
  for (int k = detail::first_mode(sub); k <= s.K; ++k) {
    if (!(s.at(k) > 0.0)) return false;
  }
  if (!detail::tail_certificate(s)) {
    throw InconclusiveTail("positivity_check: tail not certified at K = " + std::to_string(s.K) + "; raise K");
  }
  return true;
}

struct CoercivityResult {
  double value = 0.0;  // inf_k c_k / (1 + k^2)^s over the subspace
  int argmin_k = -1;   // -1 when the infimum is the tail limit
  double tail_limit = std::numeric_limits<double>::infinity();
  std::string diagnostic;
};

inline constexpr double kCoercivityFloor = 1e-12;

/// Largest lambda with l(phi, phi) >= lambda ||phi||^2_{H^s} on the subspace.
/// For a diagonal form this is inf_k c_k / (1 + k^2)^s; the tail is handled
/// through the known growth order of c_k.
inline CoercivityResult coercivity_constant(const QuadraticFormSpectrum& s, double sobolev, Subspace sub) {
  if (!(sobolev >= 0.0)) throw DomainError("coercivity_constant: s must be >= 0");
  if (!positivity_check(s, sub)) throw DomainError("coercivity_constant: form is not positive on the subspace");
  CoercivityResult r;
  r.value = std::numeric_limits<double>::infinity();
  auto ratio = [&](int k) { return s.at(k) / std::pow(1.0 + double(k) * k, sobolev); };
  for (int k = detail::first_mode(sub); k <= s.K; ++k) {
    const double q = ratio(k);
    if (q < r.value) {
      r.value = q;
      r.argmin_k = k;
    }
  }
  const double growth = s.growth_quadratic > 0.0 ? 2.0 : (s.growth_linear > 0.0 ? 1.0 : 0.0);
  const double lead = growth == 2.0 ? s.growth_quadratic : (growth == 1.0 ? s.growth_linear : s.at(s.K));
  if (2.0 * sobolev > growth) {
    r.tail_limit = 0.0;
  } else if (2.0 * sobolev == growth) {
    r.tail_limit = lead;
  }
  if (r.tail_limit < r.value && ratio(s.K) < ratio(s.K - 1)) {
    r.value = r.tail_limit;
    r.argmin_k = -1;
  } else if (r.tail_limit == 0.0) {
    r.value = 0.0;
    r.argmin_k = -1;
  }
  if (r.value < kCoercivityFloor) {
    r.value = 0.0;
    r.diagnostic = "positive but not coercive in H^s: c_k / (1+k^2)^s tends to 0";
  }
  return r;
}

/// Smallest C >= 0 with c_0 > 0 and c_1 > 0 after penalisation (the
/// boundary value; any larger C is strictly positive on those modes).
inline double minimal_penalty(const QuadraticFormSpectrum& base, double floor = 0.0) {
  if (!positivity_check(base, Subspace::TangentModes)) {
    throw DomainError("minimal_penalty: base form is not positive on the tangent modes");
  }
  const double p1 = surface_area(base.d, 1.0);
  const double c0 = (floor - base.at(0)) / (2.0 * p1);
  const double c1 = (floor - base.at(1)) * base.d / (2.0 * p1);
  return std::max({0.0, c0, c1});
}

}  // namespace shl
