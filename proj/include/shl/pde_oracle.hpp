#pragma once

// Independent PDE solvers on star-shaped perturbations of the unit disk and
// exact radial solutions on annuli in any dimension.
//
//  - Dirichlet energy: u = -|x|^2/4 + v with v harmonic, v = |x|^2/4 on the
//    boundary. v is fitted in the basis r^k (cos k theta, sin k theta) by
//    overdetermined boundary collocation, then E = -1/2 int u is integrated
//    in closed form along rays and by the periodic trapezoid rule in theta.
//  - First eigenvalue: method of particular solutions with the
//    Fourier-Bessel basis J_k(sqrt(lambda) r)(cos k theta, sin k theta),
//    interior normalisation rows, and golden-section minimisation of the
//    smallest singular value of the boundary block of Q in A = QR.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>

#include "shl/ball_reference.hpp"
#include "shl/error.hpp"
#include "shl/perturbed_disk.hpp"
#include "shl/special_functions.hpp"

namespace shl {

struct PdeSolution {
  double value = 0.0;
  std::vector<double> coefficients;  // [c_0, c_1, s_1, c_2, s_2, ...]
  double boundary_residual = 0.0;    // sup-norm on a fine check grid
  int basis_size = 0;
  double collocation_residual = 0.0;  // least-squares residual (energy) or sigma_min (eigenvalue)
};

inline constexpr double kIllConditionedResidual = 1e-6;

namespace detail {

/// Column layout shared by both solvers: 0 -> mode 0, 2k-1 -> cos k, 2k -> sin k.
inline int basis_columns(int N) { return 2 * N + 1; }

inline double sample_min(const BoundaryPerturbation& h, int n) {
  double lo = h(0.0);
  for (int i = 1; i < n; ++i) lo = std::min(lo, h(2.0 * std::numbers::pi * i / n));
  return lo;
}

inline double sample_max(const BoundaryPerturbation& h, int n) {
  double hi = h(0.0);
  for (int i = 1; i < n; ++i) hi = std::max(hi, h(2.0 * std::numbers::pi * i / n));
  return hi;
}

}  // namespace detail

/// E(Omega_h) = min 1/2 int |grad u|^2 - int u.
inline PdeSolution dirichlet_energy(const BoundaryPerturbation& h, int N, int quadrature_factor = 1) {
  h.require_star_shaped("dirichlet_energy");
  if (N < 1 || N < 4 * h.modes()) throw DomainError("dirichlet_energy: basis size N must be >= max(1, 4K)");
  if (quadrature_factor < 1) throw DomainError("dirichlet_energy: quadrature_factor must be >= 1");
  const int cols = detail::basis_columns(N);
  const int M = 4 * cols;

  auto fill_row = [N](double r, double theta, auto&& row) {
    row(0) = 1.0;
    double rk = 1.0;
    for (int k = 1; k <= N; ++k) {
      rk *= r;
      row(2 * k - 1) = rk * std::cos(k * theta);
      row(2 * k) = rk * std::sin(k * theta);
    }
  };

  Eigen::MatrixXd A(M, cols);
  Eigen::VectorXd rhs(M);
  for (int i = 0; i < M; ++i) {
    const double theta = 2.0 * std::numbers::pi * i / M;
    const double r = h.radius(theta);
    fill_row(r, theta, A.row(i));
    rhs(i) = 0.25 * r * r;
  }
  Eigen::VectorXd scale = A.cwiseAbs().colwise().maxCoeff().transpose();
  for (int c = 0; c < cols; ++c) {
    if (scale(c) == 0.0) scale(c) = 1.0;
    A.col(c) /= scale(c);
  }
  Eigen::VectorXd x = A.colPivHouseholderQr().solve(rhs);
  const double lsq = (A * x - rhs).cwiseAbs().maxCoeff();
  x = x.cwiseQuotient(scale);

  PdeSolution sol;
  sol.basis_size = cols;
  sol.collocation_residual = lsq;
  sol.coefficients.assign(x.data(), x.data() + cols);
  if (!(lsq <= kIllConditionedResidual)) {
    throw IllConditioned("dirichlet_energy: collocation residual " + std::to_string(lsq) +
                         " exceeds 1e-6; raise N or reduce the perturbation");
  }

  // Boundary residual on a 4x finer grid.
  Eigen::RowVectorXd row(cols);
  double resid = 0.0;
  for (int i = 0; i < 4 * M; ++i) {
    const double theta = 2.0 * std::numbers::pi * i / (4 * M);
    const double r = h.radius(theta);
    fill_row(r, theta, row);
    resid = std::max(resid, std::abs(row.dot(x) - 0.25 * r * r));
  }
  sol.boundary_residual = resid;

  // int_0^R u r dr = -R^4/16 + c_0 R^2/2 + sum_k R^{k+2}/(k+2) (c_k cos + s_k sin).
  const int Q = quadrature_factor * std::max(2048, 8 * M);
  double sum = 0.0;
  for (int i = 0; i < Q; ++i) {
    const double theta = 2.0 * std::numbers::pi * i / Q;
    const double R = h.radius(theta);
    const double R2 = R * R;
    double ray = -R2 * R2 / 16.0 + 0.5 * x(0) * R2;
    double Rk2 = R2;
    for (int k = 1; k <= N; ++k) {
      Rk2 *= R;
      ray += Rk2 / (k + 2.0) * (x(2 * k - 1) * std::cos(k * theta) + x(2 * k) * std::sin(k * theta));
    }
    sum += ray;
  }
  sol.value = -0.5 * 2.0 * std::numbers::pi * sum / Q;
  return sol;
}

struct EigenOptions {
  double tolerance = 1e-14;  // relative width of the final golden-section bracket
  // The eigenvalue converges much faster than sigma_min itself, so this only
  // separates "an eigenvalue is near" from "no eigenvalue in the bracket".
  double sigma_threshold = 1e-4;
};

namespace detail {

/// Boundary and interior sample points for the particular-solutions method.
struct MpsPoints {
  std::vector<double> r;
  std::vector<double> theta;
  int boundary = 0;
};

inline MpsPoints mps_points(const BoundaryPerturbation& h, int N) {
  const int cols = basis_columns(N);
  MpsPoints p;
  p.boundary = 3 * cols;
  for (int i = 0; i < p.boundary; ++i) {
    const double theta = 2.0 * std::numbers::pi * (i + 0.5) / p.boundary;
    p.theta.push_back(theta);
    p.r.push_back(h.radius(theta));
  }
  constexpr double kGoldenAngle = 2.399963229728653;
  const double radii[] = {0.25, 0.45, 0.65};
  for (int i = 0; i < cols; ++i) {
    const double theta = std::fmod(kGoldenAngle * (i + 1), 2.0 * std::numbers::pi);
    p.theta.push_back(theta);
    p.r.push_back(radii[i % 3] * h.radius(theta));
  }
  return p;
}

inline void fill_bessel_row(int N, double kappa, double r, double theta, auto&& row) {
  const std::vector<double> J = bessel_j_sequence(N, kappa * r);
  row(0) = J[0];
  for (int k = 1; k <= N; ++k) {
    row(2 * k - 1) = J[static_cast<std::size_t>(k)] * std::cos(k * theta);
    row(2 * k) = J[static_cast<std::size_t>(k)] * std::sin(k * theta);
  }
}

struct MpsProbe {
  double sigma = 0.0;
  Eigen::VectorXd coefficients;  // in the unscaled basis
};

inline MpsProbe mps_probe(const MpsPoints& pts, int N, double lambda, bool want_vector) {
  const int cols = basis_columns(N);
  const int rows = static_cast<int>(pts.r.size());
  const double kappa = std::sqrt(lambda);
  Eigen::MatrixXd A(rows, cols);
  for (int i = 0; i < rows; ++i) fill_bessel_row(N, kappa, pts.r[static_cast<std::size_t>(i)], pts.theta[static_cast<std::size_t>(i)], A.row(i));
  Eigen::VectorXd scale = A.colwise().norm().transpose();
  for (int c = 0; c < cols; ++c) {
    if (scale(c) == 0.0) scale(c) = 1.0;
    A.col(c) /= scale(c);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
  const Eigen::MatrixXd QB = Q.topRows(pts.boundary);
  MpsProbe probe;
  if (!want_vector) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(QB);
    probe.sigma = svd.singularValues()(cols - 1);
    return probe;
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(QB, Eigen::ComputeThinV);
  probe.sigma = svd.singularValues()(cols - 1);
  const Eigen::VectorXd y = svd.matrixV().col(cols - 1);
  const Eigen::MatrixXd R = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  Eigen::VectorXd x = R.triangularView<Eigen::Upper>().solve(y);
  probe.coefficients = x.cwiseQuotient(scale);
  return probe;
}

inline double mps_eval(int N, double kappa, const Eigen::VectorXd& x, double r, double theta) {
  Eigen::RowVectorXd row(basis_columns(N));
  fill_bessel_row(N, kappa, r, theta, row);
  return row.dot(x);
}

}  // namespace detail

/// First Dirichlet eigenvalue of the perturbed disk.
inline PdeSolution lambda1(const BoundaryPerturbation& h, int N, const EigenOptions& opts = {}) {
  h.require_star_shaped("lambda1");
  if (N < 1 || N < 2 * h.modes()) throw DomainError("lambda1: basis size N must be >= max(1, 2K)");
  const detail::MpsPoints pts = detail::mps_points(h, N);
  const double j0 = first_zero(BesselOrder(0.0));
  const int grid = std::max(1024, 16 * h.modes());
  const double r_max = 1.0 + detail::sample_max(h, grid);
  const double r_min = 1.0 + detail::sample_min(h, grid);
  // Inclusion B_{r_min} in Omega in B_{r_max} and monotonicity of lambda_1.
  double lo = j0 * j0 / (r_max * r_max) * (1.0 - 1e-3);
  double hi = j0 * j0 / (r_min * r_min) * (1.0 + 1e-3);

  auto sigma = [&](double lam) { return detail::mps_probe(pts, N, lam, false).sigma; };
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = sigma(x1);
  double f2 = sigma(x2);
  int iter = 0;
  while (hi - lo > opts.tolerance * hi) {
    if (++iter > 400) throw BracketFailure("lambda1: golden-section search did not terminate");
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = sigma(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = sigma(x2);
    }
  }
  const double lam = f1 <= f2 ? x1 : x2;
  const detail::MpsProbe probe = detail::mps_probe(pts, N, lam, true);
  if (!(probe.sigma < opts.sigma_threshold)) {
    throw BracketFailure("lambda1: no eigenvalue in [" + std::to_string(lo) + ", " + std::to_string(hi) +
                         "], smallest singular value " + std::to_string(probe.sigma));
  }

  // Interior sign check: the first eigenfunction does not change sign.
  const double kappa = std::sqrt(lam);
  double u_max = -std::numeric_limits<double>::infinity();
  double u_min = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 64; ++a) {
    const double theta = 2.0 * std::numbers::pi * a / 64;
    for (int b = 0; b <= 9; ++b) {
      const double u = detail::mps_eval(N, kappa, probe.coefficients, 0.1 * b * h.radius(theta), theta);
      u_max = std::max(u_max, u);
      u_min = std::min(u_min, u);
    }
  }
  const double scale = std::max(std::abs(u_max), std::abs(u_min));
  if (u_max > 1e-6 * scale && u_min < -1e-6 * scale) {
    throw SpuriousMode("lambda1: reconstructed eigenfunction changes sign at lambda = " + std::to_string(lam));
  }

  PdeSolution sol;
  sol.value = lam;
  sol.basis_size = detail::basis_columns(N);
  sol.collocation_residual = probe.sigma;
  Eigen::VectorXd coef = probe.coefficients / (u_max >= -u_min ? u_max : u_min);
  sol.coefficients.assign(coef.data(), coef.data() + coef.size());
  double resid = 0.0;
  const int check = 4 * pts.boundary;
  for (int i = 0; i < check; ++i) {
    const double theta = 2.0 * std::numbers::pi * i / check;
    resid = std::max(resid, std::abs(detail::mps_eval(N, kappa, coef, h.radius(theta), theta)));
  }
  sol.boundary_residual = resid;
  return sol;
}

// Basis ladder: start at max(32, 8K) and add 16 until the residual target is
// met or N exceeds 128.
inline constexpr int kMaxBasis = 128;
inline constexpr double kEnergyResidualTarget = 1e-11;
inline constexpr double kEigenSigmaTarget = 1e-9;

inline int initial_basis(const BoundaryPerturbation& h) { return std::max(32, 8 * h.modes()); }

inline int basis_order(const PdeSolution& s) { return (s.basis_size - 1) / 2; }

inline PdeSolution dirichlet_energy_auto(const BoundaryPerturbation& h, double target = kEnergyResidualTarget) {
  double last = std::numeric_limits<double>::infinity();
  for (int N = initial_basis(h); N <= kMaxBasis; N += 16) {
    try {
      PdeSolution s = dirichlet_energy(h, N);
      if (s.collocation_residual <= target) return s;
      last = s.collocation_residual;
    } catch (const IllConditioned&) {
    }
  }
  throw IllConditioned("dirichlet_energy_auto: residual target " + std::to_string(target) + " not met at N = " +
                       std::to_string(kMaxBasis) + " (last " + std::to_string(last) + ")");
}

inline PdeSolution lambda1_auto(const BoundaryPerturbation& h, double target = kEigenSigmaTarget) {
  double last = std::numeric_limits<double>::infinity();
  for (int N = initial_basis(h); N <= kMaxBasis; N += 16) {
    try {
      PdeSolution s = lambda1(h, N);
      if (s.collocation_residual <= target) return s;
      last = s.collocation_residual;
    } catch (const BracketFailure&) {
    }
  }
  throw IllConditioned("lambda1_auto: sigma target " + std::to_string(target) + " not met at N = " +
                       std::to_string(kMaxBasis) + " (last " + std::to_string(last) + ")");
}

/// Energy of the concentric annulus B_1 \ B_eps.
struct AnnulusEnergy {
  double quadrature = 0.0;   // -1/2 int u over the annulus, authoritative
  double closed_form = 0.0;  // printed bracketed expression times P(B_1)
  double gap = 0.0;          // closed_form - quadrature
};

namespace detail {

/// Composite 32-point Gauss-Legendre on geometrically graded panels in [a, b].
template <class F>
double graded_gauss(F&& f, double a, double b) {
  const int panels = std::max(8, static_cast<int>(std::ceil(4.0 * std::log10(b / a))));
  const double q = std::pow(b / a, 1.0 / panels);
  double sum = 0.0;
  double left = a;
  for (int i = 0; i < panels; ++i) {
    const double right = (i + 1 == panels) ? b : left * q;
    sum += boost::math::quadrature::gauss<double, 32>::integrate(f, left, right);
    left = right;
  }
  return sum;
}

inline void require_annulus(int d, double eps) {
  require_dimension(d, "annulus");
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("annulus: eps must lie in (0, 1)");
}

/// Torsion function of the annulus minus that of the unit ball,
/// u_eps - (1 - r^2)/(2d); harmonic in r and free of cancellation.
inline double annulus_correction(int d, double eps, double r) {
  if (d == 2) return (1.0 - eps * eps) / (-4.0 * std::log(eps)) * std::log(r);
  const double e2 = std::pow(eps, d - 2);
  const double ed = std::pow(eps, d);
  return (e2 - ed) * (std::pow(r, 2 - d) - 1.0) / (2.0 * d * (e2 - 1.0));
}

}  // namespace detail

/// Radial torsion function of the annulus B_1 \ B_eps in R^d.
inline double annulus_torsion(int d, double eps, double r) {
  return detail::annulus_correction(d, eps, r) + (1.0 - r * r) / (2.0 * d);
}

inline AnnulusEnergy annulus_energy(int d, double eps) {
  detail::require_annulus(d, eps);
  const double p1 = surface_area(d, 1.0);
  AnnulusEnergy out;
  const double integral = detail::graded_gauss(
      [&](double r) { return annulus_torsion(d, eps, r) * std::pow(r, d - 1); }, eps, 1.0);
  out.quadrature = -0.5 * p1 * integral;
  const double dd = d;
  double bracket = 0.0;
  if (d >= 3) {
    const double e2 = std::pow(eps, d - 2);
    const double ed = std::pow(eps, d);
    const double one_m = 1.0 - eps * eps;
    bracket = (dd * one_m * one_m * e2 - 2.0 * (1.0 - ed) * (1.0 - ed)) / (8.0 * dd * dd * (1.0 - e2)) +
              (1.0 - std::pow(eps, d + 2)) / (4.0 * dd * (dd + 2.0));
  } else {
    const double le = std::log(eps);
    const double e2 = eps * eps;
    bracket = (1.0 - e2) / (-8.0 * le) * (1.0 - e2 * (1.0 - 2.0 * le)) - (1.0 - e2 + e2 * e2 / 2.0) / 16.0;
  }
  out.closed_form = bracket * p1;
  out.gap = out.closed_form - out.quadrature;
  return out;
}

/// E(B_1 \ B_eps) - E(B_1) by quadrature of the difference of the two
/// torsion functions, accurate when eps is tiny.
inline double annulus_energy_defect(int d, double eps) {
  detail::require_annulus(d, eps);
  const double p1 = surface_area(d, 1.0);
  const double outer = detail::graded_gauss(
      [&](double r) { return detail::annulus_correction(d, eps, r) * std::pow(r, d - 1); }, eps, 1.0);
  const double core = boost::math::quadrature::gauss<double, 32>::integrate(
      [&](double r) { return (1.0 - r * r) / (2.0 * d) * std::pow(r, d - 1); }, 0.0, eps);
  return -0.5 * p1 * (outer - core);
}

}  // namespace shl
