#pragma once

// Bessel functions of the first kind, their first positive zeros, and the
// ratio sequences a_k = J_{k-1+d/2}(j), b_k = a_{k+1}/a_k evaluated at the
// first zero j = j_{d/2-1}.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/special_functions/bessel.hpp>

#include "shl/error.hpp"

namespace shl {

/// Real order of a Bessel function. Half-integers arise for odd dimension.
class BesselOrder {
 public:
  constexpr BesselOrder(double nu) : nu_(nu) {}  // NOLINT(google-explicit-constructor)
  constexpr double value() const noexcept { return nu_; }

  static BesselOrder for_dimension(int d) { return BesselOrder(0.5 * d - 1.0); }

 private:
  double nu_;
};

namespace detail {

inline void require_order(double nu, const char* who) {
  if (!std::isfinite(nu) || nu < 0.0) {
    throw DomainError(std::string(who) + ": order must be finite and >= 0, got " + std::to_string(nu));
  }
}

}  // namespace detail

/// J_nu(x) for nu >= 0 and x >= 0.
inline double bessel_j(BesselOrder order, double x) {
  const double nu = order.value();
  detail::require_order(nu, "bessel_j");
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw DomainError("bessel_j: argument must be finite and >= 0, got " + std::to_string(x));
  }
  if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  return boost::math::cyl_bessel_j(nu, x);
}

/// J'_nu(x) = (nu/x) J_nu(x) - J_{nu+1}(x).
inline double bessel_j_derivative(BesselOrder order, double x) {
  const double nu = order.value();
  if (x == 0.0) {
    if (nu == 1.0) return 0.5;
    if (nu == 0.0) return 0.0;
    return nu < 1.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return nu / x * bessel_j(order, x) - bessel_j(BesselOrder(nu + 1.0), x);
}

/// J_0(x), ..., J_{n_max}(x) for integer orders by Miller's backward
/// recurrence normalised with J_0 + 2 sum_k J_{2k} = 1.
inline std::vector<double> bessel_j_sequence(int n_max, double x) {
  if (n_max < 0) throw DomainError("bessel_j_sequence: n_max must be >= 0");
  if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("bessel_j_sequence: x must be finite and >= 0");
  std::vector<double> out(static_cast<std::size_t>(n_max) + 1, 0.0);
  if (x == 0.0) {
    out[0] = 1.0;
    return out;
  }
  const int top = std::max(n_max, static_cast<int>(std::ceil(x)));
  const int start = 2 * ((top + 20 + static_cast<int>(std::sqrt(160.0 * top))) / 2);
  constexpr double kBig = 1e250;
  constexpr double kSmall = 1e-250;

  double next = 0.0;  // J_{n+1}
  double cur = 1e-300;  // J_n
  double even_sum = 0.0;
  for (int n = start; n > 0; --n) {
    const double prev = (2.0 * n / x) * cur - next;  // J_{n-1}
    next = cur;
    cur = prev;
    if (std::abs(cur) > kBig) {
      cur *= kSmall;
      next *= kSmall;
      even_sum *= kSmall;
      for (int i = n; i <= n_max; ++i) out[static_cast<std::size_t>(i)] *= kSmall;
    }
    const int m = n - 1;
    if (m <= n_max) out[static_cast<std::size_t>(m)] = cur;
    if (m > 0 && m % 2 == 0) even_sum += cur;
  }
  const double norm = cur + 2.0 * even_sum;
  for (double& v : out) v /= norm;
  return out;
}

/// J_{nu+1}(x) / J_nu(x) by the backward three-term recurrence (a continued
/// fraction), which stays accurate where both functions underflow.
inline double bessel_ratio(BesselOrder order, double x) {
  const double nu = order.value();
  detail::require_order(nu, "bessel_ratio");
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("bessel_ratio: x must be finite and > 0");
  auto run = [&](int depth) {
    double r = 0.0;
    for (int m = depth; m >= 0; --m) r = 1.0 / (2.0 * (nu + m + 1.0) / x - r);
    return r;
  };
  int depth = static_cast<int>(2.0 * x) + 40;
  double r = run(depth);
  for (int iter = 0; iter < 20; ++iter) {
    depth *= 2;
    const double r2 = run(depth);
    if (std::abs(r2 - r) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(r2)) return r2;
    r = r2;
  }
  return r;
}

/// Smallest x > 0 with J_nu(x) = 0. Grid scan with step 0.1, bisection to
/// 1e-13, one Newton polish.
inline double first_zero(BesselOrder order) {
  const double nu = order.value();
  detail::require_order(nu, "first_zero");
  constexpr double kStep = 0.1;
  double lo = std::max(kStep, nu);
  double f_lo = bessel_j(order, lo);
  const double scan_end = nu + 10.0 + 4.0 * std::cbrt(nu + 1.0);
  double hi = lo;
  double f_hi = f_lo;
  while (f_hi > 0.0) {
    if (hi > scan_end) throw ConvergenceError("first_zero: no sign change found", lo, hi);
    lo = hi;
    f_lo = f_hi;
    hi = lo + kStep;
    f_hi = bessel_j(order, hi);
  }
  if (f_hi == 0.0) return hi;
  int guard = 0;
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = bessel_j(order, mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
    if (++guard > 200) throw ConvergenceError("first_zero: bisection stalled", lo, hi);
  }
  double x = 0.5 * (lo + hi);
  const double slope = bessel_j_derivative(order, x);
  if (slope != 0.0) {
    const double polished = x - bessel_j(order, x) / slope;
    if (polished >= lo - 1e-13 && polished <= hi + 1e-13) x = polished;
  }
  return x;
}

/// a_k = J_{k-1+d/2}(j) and b_k = a_{k+1}/a_k at the first zero
/// j = j_{d/2-1}. Entry b[0] is unused (NaN).
struct BesselRatioSequence {
  int d = 0;
  int K = 0;
  double j = 0.0;
  std::vector<double> a;  // k = 0..K+1, a[0] = 0 exactly
  std::vector<double> b;  // k = 1..K

  // Diagnostics.
  bool cross_check_failed = false;
  double max_recurrence_residual = 0.0;  // one-step three-term recurrence, relative
  double max_quotient_gap = 0.0;         // quotient vs continued fraction, relative
  double recurrence_b2 = 0.0;            // (d+2)/j - j/d from the three-term recurrence
  double printed_b2 = 0.0;               // (d^2 - j^2)/(d j), as printed in the source derivation

  double b_at(int k) const { return b.at(static_cast<std::size_t>(k)); }
};

inline constexpr double kRatioTolerance = 1e-10;

/// Ratio sequence through mode K. The authoritative b_k is the quotient of
/// directly evaluated Bessel functions while both are representable; past
/// that the continued fraction is used. The three-term recurrence is only a
/// cross-check.
inline BesselRatioSequence ratio_sequence(int d, int K) {
  if (d < 2) throw DomainError("ratio_sequence: dimension must be >= 2");
  if (K < 1) throw DomainError("ratio_sequence: K must be >= 1");
  BesselRatioSequence seq;
  seq.d = d;
  seq.K = K;
  const double half = 0.5 * d;
  seq.j = first_zero(BesselOrder(half - 1.0));
  const double j = seq.j;

  seq.a.assign(static_cast<std::size_t>(K) + 2, 0.0);
  for (int k = 1; k <= K + 1; ++k) seq.a[static_cast<std::size_t>(k)] = bessel_j(BesselOrder(k - 1 + half), j);

  constexpr double kNormalFloor = 1e-290;
  seq.b.assign(static_cast<std::size_t>(K) + 1, std::numeric_limits<double>::quiet_NaN());
  for (int k = 1; k <= K; ++k) {
    const double cf = bessel_ratio(BesselOrder(k - 1 + half), j);
    const double num = seq.a[static_cast<std::size_t>(k) + 1];
    const double den = seq.a[static_cast<std::size_t>(k)];
    double value = cf;
    if (std::abs(den) > kNormalFloor && std::abs(num) > kNormalFloor) {
      value = num / den;
      const double gap = std::abs(value - cf) / std::abs(value);
      seq.max_quotient_gap = std::max(seq.max_quotient_gap, gap);
    }
    seq.b[static_cast<std::size_t>(k)] = value;
  }

  // J_{nu-1} + J_{nu+1} = (2 nu / j) J_nu at nu = k - 1 + d/2 gives
  // b_k = (2(k-1) + d)/j - 1/b_{k-1}.
  for (int k = 2; k <= K; ++k) {
    const double predicted = (2.0 * (k - 1) + d) / j - 1.0 / seq.b[static_cast<std::size_t>(k) - 1];
    const double bk = seq.b[static_cast<std::size_t>(k)];
    seq.max_recurrence_residual = std::max(seq.max_recurrence_residual, std::abs(predicted - bk) / std::abs(bk));
  }
  seq.recurrence_b2 = (d + 2.0) / j - j / d;
  seq.printed_b2 = (d * d - j * j) / (d * j);
  seq.cross_check_failed =
      seq.max_recurrence_residual > kRatioTolerance || seq.max_quotient_gap > kRatioTolerance;
  return seq;
}

}  // namespace shl
