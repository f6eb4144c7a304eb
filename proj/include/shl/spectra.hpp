#pragma once

// Diagonal spectra of the shape Hessians of Vol, P, E and lambda_1 at the
// unit ball. A spectrum stores c_k, the coefficient multiplying
// sum_l alpha_{k,l}^2 where alpha_{k,l} are the coordinates of the normal
// perturbation in an L^2-orthonormal basis of degree-k spherical harmonics.

#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "shl/ball_reference.hpp"
#include "shl/error.hpp"
#include "shl/perturbed_disk.hpp"
#include "shl/special_functions.hpp"

namespace shl {

enum class Functional { Vol, P, E, Lambda1 };

inline std::string_view to_string(Functional f) {
  switch (f) {
    case Functional::Vol: return "Vol";
    case Functional::P: return "P";
    case Functional::E: return "E";
    case Functional::Lambda1: return "Lambda1";
  }
  return "?";
}

/// Accepts the long names and the one-letter codes V, P, E, L.
inline Functional parse_functional(std::string_view s) {
  if (s == "Vol" || s == "V") return Functional::Vol;
  if (s == "P") return Functional::P;
  if (s == "E") return Functional::E;
  if (s == "Lambda1" || s == "L") return Functional::Lambda1;
  throw DomainError("unknown functional '" + std::string(s) + "'");
}

struct Term {
  Functional tag;
  double coefficient;
};

/// Affine combination sum_i coefficient_i * J_i with distinct tags.
class FunctionalCombo {
 public:
  FunctionalCombo(std::initializer_list<Term> terms) : FunctionalCombo(std::vector<Term>(terms)) {}

  explicit FunctionalCombo(std::vector<Term> terms) : terms_(std::move(terms)) {
    if (terms_.empty()) throw DomainError("FunctionalCombo: at least one term required");
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      if (!std::isfinite(terms_[i].coefficient)) throw DomainError("FunctionalCombo: non-finite coefficient");
      for (std::size_t k = 0; k < i; ++k) {
        if (terms_[k].tag == terms_[i].tag) throw DomainError("FunctionalCombo: duplicate tag");
      }
    }
  }

  static FunctionalCombo single(Functional f) { return FunctionalCombo{{f, 1.0}}; }

  const std::vector<Term>& terms() const noexcept { return terms_; }

  double coefficient(Functional f) const {
    for (const Term& t : terms_) {
      if (t.tag == f) return t.coefficient;
    }
    return 0.0;
  }

  bool contains(Functional f) const { return coefficient(f) != 0.0; }

  std::string label() const {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      if (i > 0) os << " + ";
      if (terms_[i].coefficient != 1.0) os << terms_[i].coefficient << "*";
      os << to_string(terms_[i].tag);
    }
    return os.str();
  }

 private:
  std::vector<Term> terms_;
};

/// Sign convention of the volume multiplier.
///  - Subtract: l1[J] - mu l1[Vol] = 0, Hessian l2[J] - mu l2[Vol].
///  - Add:      l1[J] + mu l1[Vol] = 0, Hessian l2[J] + mu l2[Vol]
///              (the form used in the explicit threshold computations).
enum class MultiplierConvention { Subtract, Add };

inline std::string_view to_string(MultiplierConvention c) {
  return c == MultiplierConvention::Subtract ? "J - mu*Vol" : "J + mu*Vol";
}

/// Shape-gradient density at the unit ball: l1[J](B_1).phi = g * int phi.
inline double gradient_density(Functional f, int d) {
  detail::require_dimension(d, "gradient_density");
  switch (f) {
    case Functional::Vol: return 1.0;
    case Functional::P: return d - 1.0;
    case Functional::E: return -1.0 / (2.0 * d * d);
    case Functional::Lambda1: return -gamma_sq(d);
  }
  return 0.0;
}

struct QuadraticFormSpectrum {
  int d = 2;
  int K = 0;
  std::vector<double> c;  // c_0 .. c_K
  std::string label;
  std::string convention;  // empty for raw spectra
  double multiplier = std::numeric_limits<double>::quiet_NaN();
  // Asymptotics c_k ~ growth_quadratic k^2 + growth_linear k + O(1).
  double growth_quadratic = 0.0;
  double growth_linear = 0.0;
  std::map<std::string, double> diagnostics;

  double at(int k) const { return c.at(static_cast<std::size_t>(k)); }
};

namespace detail {

inline void require_truncation(int K, const char* who) {
  if (K < 2) throw DomainError(std::string(who) + ": truncation K must be >= 2");
}

}  // namespace detail

/// Diagonal form of l2[lambda1](B_1) on modes k >= 1.
///  - Verified: gamma^2 [(d-1) + 2 (k - j b_k)], i.e. int 2 w dn(w) + H (dn v)^2 phi^2
///    with the Helmholtz Dirichlet-to-Neumann symbol k - j b_k and H = d - 1.
///    Matches finite differences of the eigenvalue solver on the disk.
///  - Printed: gamma^2 (k - j b_k), the diagonalised expression as usually
///    quoted; kept for reproducing published thresholds.
/// The two coincide at k = 1.
enum class Lambda1Form { Verified, Printed };

inline std::string_view to_string(Lambda1Form f) { return f == Lambda1Form::Verified ? "verified" : "printed"; }

inline Lambda1Form parse_lambda1_form(std::string_view s) {
  if (s == "verified") return Lambda1Form::Verified;
  if (s == "printed") return Lambda1Form::Printed;
  throw DomainError("unknown lambda1 form '" + std::string(s) + "' (expected verified or printed)");
}

/// Spectrum of l2[f](B_1).
///   Vol:     d - 1
///   P:       k^2 + (d-2)k + (d-1)(d-2)
///   E:       k/d^2 - (d+1)/(2d^2)
///   lambda1: see Lambda1Form for k >= 1, and 3 gamma_d^2 for k = 0.
/// The lambda1 mode-0 value is fixed by dilation: lambda1((1+t)B_1) =
/// (1+t)^{-2} j^2 has second derivative 6 j^2, and h = 1 has alpha_0^2 = P(B_1).
inline QuadraticFormSpectrum raw_spectrum(Functional f, int d, int K, Lambda1Form form = Lambda1Form::Verified) {
  detail::require_dimension(d, "raw_spectrum");
  detail::require_truncation(K, "raw_spectrum");
  QuadraticFormSpectrum s;
  s.d = d;
  s.K = K;
  s.c.assign(static_cast<std::size_t>(K) + 1, 0.0);
  s.label = "raw[" + std::string(to_string(f)) + "]";
  const double dd = d;
  switch (f) {
    case Functional::Vol:
      for (int k = 0; k <= K; ++k) s.c[static_cast<std::size_t>(k)] = dd - 1.0;
      break;
    case Functional::P:
      for (int k = 0; k <= K; ++k) s.c[static_cast<std::size_t>(k)] = double(k) * k + (dd - 2.0) * k + (dd - 1.0) * (dd - 2.0);
      s.growth_quadratic = 1.0;
      s.growth_linear = dd - 2.0;
      break;
    case Functional::E:
      for (int k = 0; k <= K; ++k) s.c[static_cast<std::size_t>(k)] = k / (dd * dd) - (dd + 1.0) / (2.0 * dd * dd);
      s.growth_linear = 1.0 / (dd * dd);
      break;
    case Functional::Lambda1: {
      const BesselRatioSequence seq = ratio_sequence(d, K);
      const double g2 = gamma_sq(d);
      s.c[0] = 3.0 * g2;
      for (int k = 1; k <= K; ++k) {
        const double dtn = k - seq.j * seq.b_at(k);
        s.c[static_cast<std::size_t>(k)] = form == Lambda1Form::Verified ? g2 * (dd - 1.0 + 2.0 * dtn) : g2 * dtn;
      }
      s.growth_linear = form == Lambda1Form::Verified ? 2.0 * g2 : g2;
      s.label = "raw[Lambda1:" + std::string(to_string(form)) + "]";
      s.diagnostics["printed_c2"] = g2 * (2.0 - seq.j * seq.b_at(2));
      const double p1 = surface_area(d, 1.0);
      s.diagnostics["printed_mode0_coefficient"] = 3.0 * p1 * p1 * g2;
      s.diagnostics["ratio_cross_check_failed"] = seq.cross_check_failed ? 1.0 : 0.0;
      s.diagnostics["printed_b2"] = seq.printed_b2;
      s.diagnostics["b2"] = K >= 2 ? seq.b_at(2) : std::numeric_limits<double>::quiet_NaN();
      break;
    }
  }
  return s;
}

/// Volume multiplier of combo at B_1 in the requested convention.
inline double lagrange_multiplier(const FunctionalCombo& combo, int d,
                                  MultiplierConvention convention = MultiplierConvention::Add) {
  double mu = 0.0;
  for (const Term& t : combo.terms()) mu += t.coefficient * gradient_density(t.tag, d);
  // gradient_density(Vol) == 1, so mu is the Subtract-convention multiplier.
  return convention == MultiplierConvention::Subtract ? mu : -mu;
}

/// sum_i coefficient_i * raw_spectrum(tag_i), without a multiplier.
inline QuadraticFormSpectrum combined_spectrum(const FunctionalCombo& combo, int d, int K,
                                               Lambda1Form form = Lambda1Form::Verified) {
  QuadraticFormSpectrum out;
  out.d = d;
  out.K = K;
  out.c.assign(static_cast<std::size_t>(K) + 1, 0.0);
  out.label = combo.label();
  for (const Term& t : combo.terms()) {
    const QuadraticFormSpectrum raw = raw_spectrum(t.tag, d, K, form);
    for (int k = 0; k <= K; ++k) out.c[static_cast<std::size_t>(k)] += t.coefficient * raw.at(k);
    out.growth_quadratic += t.coefficient * raw.growth_quadratic;
    out.growth_linear += t.coefficient * raw.growth_linear;
    for (const auto& [key, v] : raw.diagnostics) out.diagnostics[std::string(to_string(t.tag)) + "." + key] = v;
  }
  return out;
}

inline constexpr double kTranslationModeTolerance = 1e-8;

/// Spectrum of the Lagrangian l2[combo] - mu' l2[Vol], with mu' the
/// Subtract-convention multiplier. The result does not depend on the
/// convention; only the reported multiplier does. Mode 1 must vanish
/// (translation invariance) and is checked, not imposed.
inline QuadraticFormSpectrum lagrangian_spectrum(const FunctionalCombo& combo, int d, int K,
                                                 MultiplierConvention convention = MultiplierConvention::Add,
                                                 Lambda1Form form = Lambda1Form::Verified) {
  QuadraticFormSpectrum s = combined_spectrum(combo, d, K, form);
  const double mu_sub = lagrange_multiplier(combo, d, MultiplierConvention::Subtract);
  for (double& v : s.c) v -= mu_sub * (d - 1.0);
  s.multiplier = convention == MultiplierConvention::Subtract ? mu_sub : -mu_sub;
  s.convention = std::string(to_string(convention));
  s.label = "lagrangian[" + combo.label() + "]";
  if (std::abs(s.at(1)) > kTranslationModeTolerance) {
    throw InvariantViolation("lagrangian_spectrum: translation mode c_1 = " + std::to_string(s.at(1)) +
                             " is not zero for " + combo.label());
  }
  return s;
}

/// combo - mu' Vol as a combination, mu' the Subtract-convention multiplier.
/// Its second variation along any path is the Lagrangian form.
inline FunctionalCombo lagrangian_combo(const FunctionalCombo& combo, int d) {
  const double mu_sub = lagrange_multiplier(combo, d, MultiplierConvention::Subtract);
  std::vector<Term> terms;
  bool has_vol = false;
  for (Term t : combo.terms()) {
    if (t.tag == Functional::Vol) {
      t.coefficient -= mu_sub;
      has_vol = true;
    }
    terms.push_back(t);
  }
  if (!has_vol) terms.push_back({Functional::Vol, -mu_sub});
  return FunctionalCombo(std::move(terms));
}

/// Exact-penalisation weights: C (Vol - V0)^2 + C |M(Omega) - M(Omega*)|^2
/// where M is the first moment int_Omega x.
struct PenaltySpec {
  double C = 0.0;
  double volume_target = 0.0;
  std::vector<double> barycenter_target;

  PenaltySpec() = default;
  PenaltySpec(double weight, double vol, std::vector<double> bary)
      : C(weight), volume_target(vol), barycenter_target(std::move(bary)) {
    if (!(C >= 0.0) || !std::isfinite(C)) throw DomainError("PenaltySpec: C must be finite and >= 0");
  }
};

/// At a feasible critical ball the squared constraints add 2C (first
/// variation)^2. int phi = sqrt(P) alpha_0 and int phi x_i = sqrt(P/d)
/// alpha_{1,i}, so only modes 0 and 1 move.
inline QuadraticFormSpectrum penalized_spectrum(const QuadraticFormSpectrum& base, const PenaltySpec& pen) {
  if (!(pen.C >= 0.0)) throw DomainError("penalized_spectrum: C must be >= 0");
  QuadraticFormSpectrum s = base;
  const double p1 = surface_area(base.d, 1.0);
  s.c.at(0) += 2.0 * pen.C * p1;
  s.c.at(1) += 2.0 * pen.C * p1 / base.d;
  std::ostringstream os;
  os.precision(17);
  os << "penalized[C=" << pen.C << "](" << base.label << ")";
  s.label = os.str();
  return s;
}

/// sum_k c_k rho_k for a disk perturbation (d = 2).
inline double evaluate(const QuadraticFormSpectrum& s, const BoundaryPerturbation& h) {
  if (s.d != 2) throw DomainError("evaluate: disk perturbations require d = 2");
  if (h.modes() > s.K) throw DomainError("evaluate: perturbation has modes beyond the spectrum truncation");
  double sum = 0.0;
  for (int k = 0; k <= h.modes(); ++k) sum += s.at(k) * h.mode_mass(k);
  return sum;
}

}  // namespace shl
