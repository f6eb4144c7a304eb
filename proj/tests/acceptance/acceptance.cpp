// One PASS/FAIL line per acceptance criterion. With an argument N only
// criterion N runs; the exit status is non-zero when any selected line fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "shl/shl.hpp"

using namespace shl;
using BP = BoundaryPerturbation;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void note(Outcome& o, bool ok, const std::string& what) {
  o.pass = o.pass && ok;
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += what + (ok ? "" : " [fail]");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double min_tangent(const QuadraticFormSpectrum& s) {
  double lo = s.at(2);
  for (int k = 2; k <= s.K; ++k) lo = std::min(lo, s.at(k));
  return lo;
}

Outcome criterion_1() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  for (int d : {2, 3}) {
    const ThresholdReport r = threshold(Pair::PE, d, 200);
    const double expected = -(d + 1.0) * d * d;
    const double rel = std::abs(r.sup_tau - expected) / std::abs(expected);
    note(o, rel <= 1e-10 && r.argmax_k == 2, fmt("d=%d sup tau %.12g at k=%d", d, r.sup_tau, r.argmax_k));
    const double lo = min_tangent(lagrangian_family(Pair::PE, r.sup_tau, d, 200));
    note(o, std::abs(lo) <= 1e-9, fmt("min c_k at threshold %.2e", lo));
  }
  const double t = seconds_since(t0);
  note(o, t < 1.0, fmt("%.3f s", t));
  return o;
}

Outcome criterion_2() {
  Outcome o;
  const auto F = lagrangian_spectrum(FunctionalCombo::single(Functional::P), 2, 100);
  double worst = 0.0;
  for (int k = 0; k <= 100; ++k) worst = std::max(worst, std::abs(F.at(k) - (k - 1.0) * (k + 1.0)));
  note(o, worst == 0.0, fmt("max |c_k - (k-1)(k+1)| = %.1e", worst));
  const double c0 = coercivity_constant(F, 0.0, Subspace::TangentModes).value;
  const double c1 = coercivity_constant(F, 1.0, Subspace::TangentModes).value;
  note(o, std::abs(c0 - 3.0) <= 1e-14 && std::abs(c1 - 0.6) <= 1e-14, fmt("coercivity s=0 %.15g, s=1 %.15g", c0, c1));
  return o;
}

Outcome criterion_3() {
  Outcome o;
  double worst = 0.0;
  int count = 0;
  for (Pair p : {Pair::PE, Pair::PL, Pair::EL, Pair::LE}) {
    for (int d = 2; d <= 5; ++d) {
      for (int i = 0; i <= 20; ++i) {
        const double t = -50.0 + 5.0 * i;
        for (Lambda1Form f : {Lambda1Form::Verified, Lambda1Form::Printed}) {
          worst = std::max(worst, std::abs(lagrangian_family(p, t, d, 10, f).at(1)));
          ++count;
        }
      }
    }
  }
  note(o, worst <= 1e-10, fmt("max |c_1(t)| = %.2e over %d spectra", worst, count));
  return o;
}

Outcome criterion_4() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const double amp = 0.05;
  const double step = 1.0;
  int checked = 0, failed = 0;
  std::string failures;
  for (Functional f : {Functional::Vol, Functional::P, Functional::E, Functional::Lambda1}) {
    for (const auto& [name, dir] : standard_directions()) {
      if (name == "sin1") continue;
      const FdReport r = second_derivative_fd(FunctionalCombo::single(f), dir.scaled(amp), step);
      const FdSuiteEntry e{name, r, false};
      bool ok = entry_passes(e);
      if (r.order_status == "observed") {
        ok = ok && std::abs(r.richardson_order - 2.0) <= 0.2;
      } else {
        ok = ok && r.order_status == "exact";
      }
      ++checked;
      if (!ok) {
        ++failed;
        failures += fmt(" %s/%s(gap %.1e, %s %.2f)", std::string(to_string(f)).c_str(), name.c_str(), r.rel_gap,
                        r.order_status.c_str(), r.richardson_order);
      }
    }
  }
  note(o, failed == 0, fmt("%d/%d rows within 1e-3 and order 2+-0.2 or exact%s", checked - failed, checked, failures.c_str()));

  const FdReport e1 = second_derivative_fd(FunctionalCombo::single(Functional::E), BP::constant(1.0), 1e-3);
  note(o, std::abs(e1.j0pp_fd + 3 * pi / 4) <= 1e-6 * 3 * pi / 4, fmt("E dilation %.10g", e1.j0pp_fd));
  const double j2 = std::pow(first_zero(BesselOrder(0.0)), 2);
  const FdReport l1 = second_derivative_fd(FunctionalCombo::single(Functional::Lambda1), BP::constant(1.0), 1e-3);
  note(o, std::abs(l1.j0pp_fd - 6 * j2) <= 1e-6 * 6 * j2, fmt("lambda1 dilation %.10g vs 6 j0^2 %.10g", l1.j0pp_fd, 6 * j2));
  const double mode0 = raw_spectrum(Functional::Lambda1, 2, 4).at(0) / gamma_sq(2);
  note(o, std::abs(mode0 - 3.0) <= 1e-12, fmt("lambda1 mode-0 coefficient %.12g gamma^2", mode0));

  // Informational: the diagonal form without the curvature and factor-two terms.
  const BP h = BP::mode(2, amp);
  const FdReport fd = second_derivative_fd(FunctionalCombo::single(Functional::Lambda1), h, step);
  const double printed = evaluate(raw_spectrum(Functional::Lambda1, 2, 10, Lambda1Form::Printed), h);
  o.detail += fmt("; printed-form lambda1 cos2 prediction %.6g vs FD %.6g (gap %.2f)", printed, fd.j0pp_fd,
                  std::abs(printed - fd.j0pp_fd) / std::abs(fd.j0pp_fd));
  const double t = seconds_since(t0);
  note(o, t < 120.0, fmt("%.1f s", t));
  return o;
}

Outcome criterion_5() {
  Outcome o;
  const PlAdjudication a = adjudicate_pl_threshold(BP::mode(2, 0.05), 1.0);
  const double target = -0.86152;
  const double rel_target = std::abs(a.fd_root - target) / std::abs(target);
  note(o, rel_target <= 0.02,
       fmt("FD sign change %.7g vs -0.86152 (rel %.3f); own spectral sup %.7g (rel %.1e)", a.fd_root, rel_target,
           a.spectral, a.rel_gap_spectral));
  note(o, a.inconsistent_with_printed,
       fmt("distance to printed %.5g is %.1f FD tolerances (tol %.1e)", a.printed, a.printed_distance, a.tolerance));
  return o;
}

Outcome criterion_6() {
  Outcome o;
  int violations = 0;
  double worst_b = 0.0;
  for (int d = 2; d <= 5; ++d) {
    const BesselRatioSequence seq = ratio_sequence(d, 200);
    worst_b = std::max(worst_b, seq.max_recurrence_residual);
    const ThresholdReport r = threshold(Pair::PL, d, 200);
    for (int k = 3; k <= 200; ++k) violations += r.tau_at(k) > r.tau_at(2) ? 1 : 0;
  }
  note(o, violations == 0, fmt("%d violations of tau_k <= tau_2, k <= 200, d = 2..5", violations));
  note(o, worst_b <= 1e-10, fmt("b_k recurrence residual %.1e", worst_b));
  return o;
}

Outcome criterion_7() {
  Outcome o;
  const auto F = lagrangian_spectrum(FunctionalCombo::single(Functional::P), 2, 100);
  const double C = minimal_penalty(F);
  note(o, std::abs(C - 1 / (4 * pi)) <= 1e-12, fmt("minimal C %.15g vs 1/(4 pi)", C));
  const auto pen = penalized_spectrum(F, PenaltySpec(1 / (2 * pi), pi, {0.0, 0.0}));
  double lo = pen.at(0);
  for (int k = 0; k <= 100; ++k) lo = std::min(lo, pen.at(k));
  note(o, lo > 0.0, fmt("C = 1/(2 pi): min c_k over 0..100 = %.6g", lo));
  return o;
}

Outcome criterion_8() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const AnnulusExperiment ex3 = run_annulus_experiment(3, -0.1, log_grid(0.1, 1e-6, 4));
  bool negative = true;
  for (const AnnulusRow& r : ex3.rows) {
    if (r.eps <= 1e-3 * (1 + 1e-12)) negative = negative && r.deficit < 0.0;
  }
  note(o, negative, "d=3 deficit negative for every grid eps <= 1e-3");
  const AsymptoticSlopes s = asymptotic_slopes(3, 1e-3);
  note(o, std::abs(s.p_order - 2) <= 0.1 && std::abs(s.e_order - 1) <= 0.1,
       fmt("orders (%.4f, %.4f)", s.p_order, s.e_order));

  const AnnulusExperiment ex2 = run_annulus_experiment(2, -0.1, log_grid(0.1, 1e-8, 4));
  bool found = false;
  for (const AnnulusRow& r : ex2.rows) {
    if (r.deficit < 0.0 && r.l1_distance < 0.05 * ex2.ball_volume) found = true;
  }
  note(o, found, fmt("d=2 negative deficit at eps = %.3g", ex2.crossover.value_or(NAN)));

  double worst = 0.0;
  for (double eps : {0.5, 0.2, 0.05}) {
    const AnnulusEnergy a = annulus_energy(3, eps);
    worst = std::max(worst, std::abs(a.gap) / std::abs(a.quadrature));
  }
  note(o, worst <= 1e-10, fmt("d=3 closed form vs quadrature %.1e", worst));
  const AnnulusEnergy a2 = annulus_energy(2, 0.1);
  o.detail += fmt("; d=2 bracket gap %.6g (closed %.6g, quadrature %.6g)", a2.gap, a2.closed_form, a2.quadrature);
  const double t = seconds_since(t0);
  note(o, t < 10.0, fmt("%.2f s", t));
  return o;
}

Outcome criterion_9() {
  Outcome o;
  const GrowthReport g = quadratic_growth_trials(-8.0, 20, 20261016);
  int passed = 0;
  double max_amp = 0.0;
  for (const GrowthTrial& tr : g.trials) {
    passed += tr.passed ? 1 : 0;
    max_amp = std::max(max_amp, tr.h.sup_bound());
  }
  note(o, g.all_passed && passed == 20, fmt("%d/20 trials, coercivity %.6g, min ratio %.4g", passed, g.coercivity, g.min_ratio));
  note(o, max_amp <= 0.05 + 1e-3, fmt("max |h| bound %.4g", max_amp));
  return o;
}

Outcome criterion_10() {
  Outcome o;
  const std::vector<BP> hs = {BP::mode(2, 0.1), BP::mode(3, 0.05) + BP::mode(2, 0.05, true),
                              BP::constant(0.02) + BP::mode(4, 0.05)};
  double conv_e = 0.0, conv_l = 0.0, hom_e = 0.0, hom_l = 0.0;
  for (const BP& h : hs) {
    const int N = initial_basis(h);
    const double e1 = dirichlet_energy(h, N).value, e2 = dirichlet_energy(h, 2 * N).value;
    const double l1 = lambda1(h, N).value, l2 = lambda1(h, 2 * N).value;
    conv_e = std::max(conv_e, std::abs(e1 - e2) / std::abs(e2));
    conv_l = std::max(conv_l, std::abs(l1 - l2) / std::abs(l2));
    for (double a : {-0.1, 0.1}) {
      const BP scaled = BP::constant(a) + h.scaled(1 + a);
      hom_e = std::max(hom_e, std::abs(dirichlet_energy_auto(scaled).value / std::pow(1 + a, 4) - e2) / std::abs(e2));
      hom_l = std::max(hom_l, std::abs(lambda1_auto(scaled).value * std::pow(1 + a, 2) - l2) / std::abs(l2));
    }
  }
  note(o, conv_e <= 1e-8 && conv_l <= 1e-8, fmt("N vs 2N: E %.1e, lambda1 %.1e", conv_e, conv_l));
  note(o, hom_e <= 1e-9 && hom_l <= 1e-9, fmt("homogeneity: E %.1e, lambda1 %.1e", hom_e, hom_l));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria = {criterion_1, criterion_2, criterion_3, criterion_4,
                                                          criterion_5, criterion_6, criterion_7, criterion_8,
                                                          criterion_9, criterion_10};
  int first = 1, last = static_cast<int>(criteria.size());
  if (argc > 1) {
    first = last = std::atoi(argv[1]);
    if (first < 1 || first > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "usage: %s [1..%zu]\n", argv[0], criteria.size());
      return 2;
    }
  }
  int failures = 0;
  for (int i = first; i <= last; ++i) {
    Outcome o;
    try {
      o = criteria[static_cast<std::size_t>(i) - 1]();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s criterion %d: %s\n", o.pass ? "PASS" : "FAIL", i, o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
