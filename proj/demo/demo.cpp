// Tour of the library: thresholds, a coercivity constant, one FD check and
// the annulus counterexample.

#include <cstdio>

#include "shl/shl.hpp"

int main() {
  using namespace shl;

  std::printf("P + t E: stability threshold\n");
  for (int d = 2; d <= 4; ++d) {
    const ThresholdReport r = threshold(Pair::PE, d, 100);
    std::printf("  d=%d  sup tau_k = %.12g at k=%d\n", d, r.sup_tau, r.argmax_k);
  }

  const QuadraticFormSpectrum fuglede = lagrangian_spectrum(FunctionalCombo::single(Functional::P), 2, 100);
  std::printf("\nPerimeter Lagrangian on the disk: c_2 = %g, c_3 = %g\n", fuglede.at(2), fuglede.at(3));
  std::printf("  coercivity in L2: %g, in H1: %g\n",
              coercivity_constant(fuglede, 0.0, Subspace::TangentModes).value,
              coercivity_constant(fuglede, 1.0, Subspace::TangentModes).value);
  std::printf("  minimal penalty weight: %.15g (1/(4 pi) = %.15g)\n", minimal_penalty(fuglede),
              0.25 / std::numbers::pi);

  const FdReport fd = second_derivative_fd(FunctionalCombo::single(Functional::Lambda1),
                                           BoundaryPerturbation::mode(2, 0.05), 1.0);
  std::printf("\nlambda_1 along 0.05 cos 2theta: FD %.10g, spectral %.10g, order %.3f\n", fd.j0pp_fd,
              fd.j0pp_analytic, fd.richardson_order);

  const AnnulusExperiment ex = run_annulus_experiment(3, -0.1, log_grid(0.1, 1e-5, 2));
  std::printf("\nAnnulus with gamma = -0.1, d = 3\n");
  for (const AnnulusRow& row : ex.rows) {
    std::printf("  eps=%-10.3g deficit=% .6e\n", row.eps, row.deficit);
  }
  if (ex.crossover) std::printf("  first negative deficit at eps = %g\n", *ex.crossover);
  return 0;
}
