#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "shl/stability.hpp"

using Catch::Approx;
using namespace shl;
using oracle::pi;

namespace {

struct Ref {
  double j = 0.0;
  double g2 = 0.0;
  std::vector<double> b;  // b[k], k >= 1

  explicit Ref(int d, int K) {
    j = oracle::first_zero(0.5 * d - 1.0);
    g2 = 2 * j * j / (d * std::pow(pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0));
    b.assign(K + 1, 0.0);
    for (int k = 1; k <= K; ++k) b[k] = oracle::bessel_ratio(k - 1 + 0.5 * d, j);
  }
};

// Root of c_k(t) for P + t lambda1 from the per-mode formulas; the eigenvalue
// Lagrangian coefficient is gamma^2 (k + d - 1 - j b_k) times 1 (printed) or 2.
double tau_pl(const Ref& r, int d, int k, double factor) {
  return -(k - 1.0) * (k + d - 1.0) / (factor * r.g2 * (k + d - 1.0 - r.j * r.b[k]));
}

}  // namespace

TEST_CASE("P + tE threshold") {
  for (int d = 2; d <= 5; ++d) {
    const ThresholdReport r = threshold(Pair::PE, d, 100);
    const double expected = -(d + 1.0) * d * d;
    CHECK(std::abs(r.sup_tau - expected) <= 1e-10 * std::abs(expected));
    CHECK(r.argmax_k == 2);
    CHECK(r.agrees_with_closed_form);
    CHECK(r.tail_certified);
    const auto at = lagrangian_family(Pair::PE, r.sup_tau, d, 100);
    double lo = at.at(2);
    for (int k = 2; k <= 100; ++k) lo = std::min(lo, at.at(k));
    CHECK(std::abs(lo) <= 1e-9);
  }
  CHECK(threshold(Pair::PE, 2, 100).sup_tau == Approx(-12.0).epsilon(1e-12));
  CHECK(threshold(Pair::PE, 3, 100).sup_tau == Approx(-36.0).epsilon(1e-12));
}

TEST_CASE("P + t lambda1 threshold against the series oracle") {
  for (int d = 2; d <= 5; ++d) {
    const Ref ref(d, 200);
    const ThresholdReport v = threshold(Pair::PL, d, 200, Lambda1Form::Verified);
    const ThresholdReport p = threshold(Pair::PL, d, 200, Lambda1Form::Printed);
    for (int k = 2; k <= 200; k += 11) {
      CHECK(v.tau_at(k) == Approx(tau_pl(ref, d, k, 2.0)).epsilon(1e-10));
      CHECK(p.tau_at(k) == Approx(tau_pl(ref, d, k, 1.0)).epsilon(1e-10));
    }
    CHECK(v.argmax_k == 2);
    CHECK(v.tail_certified);
    CHECK(v.sup_tau == Approx(0.5 * p.sup_tau).epsilon(1e-12));
    const double printed = -d * (d + 1.0) / (ref.g2 * (d + ref.j * ref.j));
    CHECK(*v.closed_form == Approx(printed).epsilon(1e-12));
    CHECK_FALSE(v.agrees_with_closed_form);
    CHECK_FALSE(p.agrees_with_closed_form);
  }
  const ThresholdReport v2 = threshold(Pair::PL, 2, 200);
  CHECK(v2.sup_tau == Approx(-0.4307708232).margin(1e-9));
  CHECK(threshold(Pair::PL, 2, 200, Lambda1Form::Printed).sup_tau == Approx(-0.86154).margin(1e-5));
  CHECK(*v2.closed_form == Approx(-0.41877).margin(1e-5));
}

TEST_CASE("monotonicity tau_k <= tau_2 up to k = 200") {
  for (int d = 2; d <= 5; ++d) {
    for (Lambda1Form f : {Lambda1Form::Verified, Lambda1Form::Printed}) {
      const ThresholdReport r = threshold(Pair::PL, d, 200, f);
      for (int k = 3; k <= 200; ++k) CHECK(r.tau_at(k) <= r.tau_at(2));
    }
  }
}

TEST_CASE("threshold exactness at the computed supremum") {
  for (int d = 2; d <= 4; ++d) {
    for (Pair p : {Pair::PE, Pair::PL, Pair::EL}) {
      const ThresholdReport r = threshold(p, d, 200);
      const auto at = lagrangian_family(p, r.sup_tau, d, 200);
      double lo = at.at(2);
      for (int k = 2; k <= 200; ++k) lo = std::min(lo, at.at(k));
      INFO(to_string(p) << " d = " << d);
      CHECK(std::abs(lo) <= 1e-9);
    }
  }
}

TEST_CASE("b_k is positive and bounded by b_1") {
  for (int d = 2; d <= 5; ++d) {
    const Ref ref(d, 200);
    for (int k = 1; k <= 200; ++k) {
      CHECK(ref.b[k] > 0.0);
      CHECK(ref.b[k] <= ref.b[1]);
    }
  }
}

TEST_CASE("bound chain for E + t lambda1 with the printed eigenvalue Hessian") {
  for (int d = 2; d <= 5; ++d) {
    const ThresholdReport r = threshold(Pair::EL, d, 200, Lambda1Form::Printed);
    const double g2 = gamma_sq(d);
    const double bound = *r.closed_form;
    for (int k = 2; k <= 200; ++k) {
      const double mid = -(k - 1.0) / (d * d * g2 * (k + d - 1.0));
      CHECK(r.tau_at(k) < mid);
      CHECK(mid <= bound + 1e-15);
    }
    CHECK(r.agrees_with_closed_form);
  }
}

TEST_CASE("with the verified eigenvalue Hessian the printed E + t lambda1 bound is not sufficient") {
  for (int d = 2; d <= 5; ++d) {
    const ThresholdReport r = threshold(Pair::EL, d, 200, Lambda1Form::Verified);
    CHECK(r.sup_all_modes > *r.closed_form);
    CHECK_FALSE(r.agrees_with_closed_form);
    CHECK(r.tail_certified);
  }
  CHECK(threshold(Pair::EL, 2, 200).sup_tau == Approx(-0.0358976).margin(1e-7));
}

TEST_CASE("lambda1 + tE tail limit") {
  for (int d = 2; d <= 4; ++d) {
    const double g2 = gamma_sq(d);
    const ThresholdReport v = threshold(Pair::LE, d, 200, Lambda1Form::Verified);
    const ThresholdReport p = threshold(Pair::LE, d, 200, Lambda1Form::Printed);
    CHECK(v.tail_limit == Approx(-2 * g2 * d * d));
    CHECK(p.tail_limit == Approx(-g2 * d * d));
    CHECK(v.tail_certified);
    CHECK(p.tail_certified);
    CHECK(v.sup_all_modes == Approx(v.tail_limit));
    // tau_k increases towards the limit
    CHECK(v.tau_at(200) > v.tau_at(100));
    CHECK(v.agrees_with_closed_form);
    CHECK(p.agrees_with_closed_form);
  }
}

TEST_CASE("threshold argument checks") {
  CHECK_THROWS_AS(threshold(Pair::PE, 2, 5), DomainError);
  CHECK_THROWS_AS(threshold(Pair::PE, 1, 50), DomainError);
  CHECK(parse_pair("LE") == Pair::LE);
  CHECK_THROWS_AS(parse_pair("PP"), DomainError);
}

TEST_CASE("positivity examples") {
  const auto F = lagrangian_spectrum(FunctionalCombo::single(Functional::P), 2, 100);
  CHECK(positivity_check(F, Subspace::TangentModes));
  CHECK_FALSE(positivity_check(F, Subspace::AllModes));
  const auto below = lagrangian_family(Pair::PE, -13.0, 2, 100);
  CHECK(below.at(2) == Approx(-0.25));
  CHECK_FALSE(positivity_check(below, Subspace::TangentModes));
}

TEST_CASE("coercivity examples") {
  const auto F = lagrangian_spectrum(FunctionalCombo::single(Functional::P), 2, 100);
  CHECK(coercivity_constant(F, 1.0, Subspace::TangentModes).value == Approx(0.6).epsilon(1e-14));
  CHECK(coercivity_constant(F, 0.0, Subspace::TangentModes).value == Approx(3.0).epsilon(1e-14));
  CHECK(coercivity_constant(F, 1.0, Subspace::TangentModes).argmin_k == 2);
  const auto E = raw_spectrum(Functional::E, 2, 100);
  CHECK(coercivity_constant(E, 0.5, Subspace::TangentModes).value == Approx(0.125 / std::sqrt(5.0)).epsilon(1e-14));
  CHECK(coercivity_constant(E, 0.5, Subspace::TangentModes).value == Approx(0.0559).margin(1e-4));
  const CoercivityResult weak = coercivity_constant(E, 1.0, Subspace::TangentModes);
  CHECK(weak.value == 0.0);
  CHECK_FALSE(weak.diagnostic.empty());
  CHECK_THROWS_AS(coercivity_constant(F, 1.0, Subspace::AllModes), DomainError);
}

TEST_CASE("coercivity in the family at t = -8") {
  // c_k(-8) = (k-1)(k-1) at d = 2; inf of (k-1)^2/(1+k^2) is 1/5 at k = 2.
  const auto s = lagrangian_family(Pair::PE, -8.0, 2, 100);
  for (int k = 0; k <= 100; ++k) CHECK(s.at(k) == Approx((k - 1.0) * (k - 1.0)).margin(1e-12));
  CHECK(coercivity_constant(s, 1.0, Subspace::TangentModes).value == Approx(0.2).epsilon(1e-14));
}

TEST_CASE("positivity and coercivity agree above each threshold") {
  for (int d = 2; d <= 4; ++d) {
    for (Pair p : {Pair::PE, Pair::PL, Pair::EL, Pair::LE}) {
      const ThresholdReport r = threshold(p, d, 100);
      const double s2 = natural_indices(p).s2;
      for (double margin : {0.01, 0.5, 3.0}) {
        const double t = r.sup_all_modes + margin * std::abs(r.sup_all_modes);
        const auto s = lagrangian_family(p, t, d, 100);
        INFO(to_string(p) << " d = " << d << " t = " << t);
        CHECK(positivity_check(s, Subspace::TangentModes));
        CHECK(coercivity_constant(s, s2, Subspace::TangentModes).value > 0.0);
      }
      const auto below = lagrangian_family(p, r.sup_tau - 0.01 * std::abs(r.sup_tau), d, 100);
      CHECK_FALSE(positivity_check(below, Subspace::TangentModes));
    }
  }
}

TEST_CASE("minimal penalty") {
  const auto F = lagrangian_spectrum(FunctionalCombo::single(Functional::P), 2, 100);
  CHECK(std::abs(minimal_penalty(F) - 1 / (4 * pi)) <= 1e-12);
  CHECK(minimal_penalty(lagrangian_family(Pair::PE, -8.0, 2, 100)) == 0.0);
  // floor variant: c_0 + 4 pi C >= 1 and c_1 + 2 pi C >= 1
  const double C = minimal_penalty(F, 1.0);
  const auto pen = penalized_spectrum(F, PenaltySpec(C, pi, {0, 0}));
  CHECK(std::min(pen.at(0), pen.at(1)) == Approx(1.0).epsilon(1e-12));
  const auto strong = penalized_spectrum(F, PenaltySpec(1 / (2 * pi), pi, {0, 0}));
  for (int k = 0; k <= 100; ++k) CHECK(strong.at(k) > 0.0);
  CHECK(positivity_check(strong, Subspace::AllModes));
  CHECK_THROWS_AS(minimal_penalty(lagrangian_family(Pair::PE, -13.0, 2, 100)), DomainError);
}

TEST_CASE("tail certificate is required") {
  QuadraticFormSpectrum s;
  s.d = 2;
  s.K = 3;
  s.c = {1.0, 1.0, 2.0, 1.0};
  s.growth_quadratic = 1.0;
  CHECK_THROWS_AS(positivity_check(s, Subspace::TangentModes), InconclusiveTail);
  s.c = {1.0, 1.0, 2.0, 3.0};
  CHECK(positivity_check(s, Subspace::TangentModes));
}

TEST_CASE("Sobolev index pairs") {
  CHECK(natural_indices(Functional::P).s2 == 1.0);
  CHECK(natural_indices(Functional::E).s2 == 0.5);
  CHECK(natural_indices(Functional::Lambda1).s2 == 0.5);
  CHECK_THROWS_AS(SobolevIndexPair(0.5, 0.5), DomainError);
  CHECK(natural_s2(pair_combo(Pair::PE, -3.0)) == 1.0);
  CHECK(natural_s2(pair_combo(Pair::EL, 1.0)) == 0.5);
}
