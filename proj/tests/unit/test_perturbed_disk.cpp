#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "shl/perturbed_disk.hpp"

using Catch::Approx;
using namespace shl;
using oracle::pi;
using BP = BoundaryPerturbation;

namespace {

// Plain Riemann sums on n points, independent of the library's quadrature.
double riemann_area(const BP& h, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double th = 2 * pi * i / n;
    double r = 1.0 + h.a0();
    for (int k = 1; k <= h.modes(); ++k) r += h.a(k) * std::cos(k * th) + h.b(k) * std::sin(k * th);
    s += 0.5 * r * r;
  }
  return s * 2 * pi / n;
}

double riemann_length(const BP& h, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double th = 2 * pi * i / n;
    double r = 1.0 + h.a0(), dr = 0.0;
    for (int k = 1; k <= h.modes(); ++k) {
      r += h.a(k) * std::cos(k * th) + h.b(k) * std::sin(k * th);
      dr += k * (h.b(k) * std::cos(k * th) - h.a(k) * std::sin(k * th));
    }
    s += std::hypot(r, dr);
  }
  return s * 2 * pi / n;
}

BP random_smooth(std::mt19937_64& rng, int K) {
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  std::vector<double> c(K), s(K);
  for (int k = 0; k < K; ++k) {
    c[k] = u(rng);
    s[k] = u(rng);
  }
  return {u(rng), c, s};
}

}  // namespace

TEST_CASE("volume examples") {
  CHECK(volume(BP{}) == Approx(pi).epsilon(1e-15));
  CHECK(volume(BP::mode(2, 0.1)) == Approx(pi * 1.005).epsilon(1e-15));
  CHECK(volume(BP::mode(2, 0.1)) == Approx(3.157301).margin(1e-6));
  CHECK(volume(BP::constant(0.2)) == Approx(pi * 1.44).epsilon(1e-15));
}

TEST_CASE("perimeter examples") {
  CHECK(perimeter(BP{}) == Approx(2 * pi).epsilon(1e-14));
  CHECK(perimeter(BP::constant(0.3)) == Approx(2 * pi * 1.3).epsilon(1e-14));
  const double p = perimeter(BP::mode(2, 0.1));
  CHECK(p == Approx(riemann_length(BP::mode(2, 0.1), 200000)).epsilon(1e-12));
  CHECK(p == Approx(6.3457068653416675).epsilon(1e-12));
}

TEST_CASE("perimeter second-order expansion with an eps^4 remainder") {
  // P(eps cos k) = 2 pi + eps^2 k^2 pi / 2 + O(eps^4); the remainder quarters
  // twice per halving of eps.
  for (int k : {2, 3}) {
    double prev = 0.0;
    for (double eps : {0.08, 0.04, 0.02, 0.01}) {
      const double rem = perimeter(BP::mode(k, eps)) - (2 * pi + eps * eps * k * k * pi / 2);
      if (prev != 0.0) CHECK(prev / rem == Approx(16.0).epsilon(0.05));
      prev = rem;
    }
  }
}

TEST_CASE("volume and perimeter against 1e6-point Riemann sums") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 4; ++trial) {
    const BP h = random_smooth(rng, 1 + trial * 2 + (trial == 3 ? 1 : 0));
    CHECK(volume(h) == Approx(riemann_area(h, 1000000)).epsilon(1e-9));
    CHECK(perimeter(h) == Approx(riemann_length(h, 1000000)).epsilon(1e-9));
  }
}

TEST_CASE("isoperimetric sanity") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const BP h = random_smooth(rng, 5);
    CHECK(perimeter(h) * perimeter(h) > 4 * pi * volume(h));
  }
  const BP c = BP::constant(0.25);
  CHECK(perimeter(c) * perimeter(c) == Approx(4 * pi * volume(c)).epsilon(1e-13));
  const BP h = BP::mode(2, 0.1);
  CHECK(perimeter(h) * perimeter(h) - 4 * pi * volume(h) > 0.1);
}

TEST_CASE("volume is exactly quadratic along the path") {
  const BP h = BP::constant(0.02) + BP::mode(1, 0.03) + BP::mode(3, -0.04, true);
  double int_h = 2 * pi * h.a0();
  double int_h2 = 0.0;
  for (int k = 0; k <= h.modes(); ++k) int_h2 += h.mode_mass(k);
  for (double t : {-0.7, -0.2, 0.3, 1.0}) {
    const double taylor = pi + t * int_h + t * t * 0.5 * int_h2;
    CHECK(volume(h.scaled(t)) - taylor == Approx(0.0).margin(1e-14));
  }
}

TEST_CASE("Sobolev norms") {
  CHECK(sobolev_norm(BP::mode(2, 1.0), 0.0) == Approx(std::sqrt(pi)).epsilon(1e-15));
  CHECK(sobolev_norm(BP::mode(2, 1.0), 1.0) == Approx(std::sqrt(5 * pi)).epsilon(1e-15));
  CHECK(sobolev_norm(BP{}, 0.5) == 0.0);
  // L2 norm on the circle by quadrature
  const BP h = BP::constant(0.3) + BP::mode(2, 0.2) + BP::mode(5, 0.1, true);
  const double l2 = oracle::simpson([&](double th) { return h(th) * h(th); }, 0, 2 * pi, 4000);
  CHECK(sobolev_norm(h, 0.0) == Approx(std::sqrt(l2)).epsilon(1e-12));
  // H1 = L2 + |h'|^2
  const double d2 = oracle::simpson([&](double th) { return h.derivative(th) * h.derivative(th); }, 0, 2 * pi, 4000);
  CHECK(sobolev_norm(h, 1.0) == Approx(std::sqrt(l2 + d2)).epsilon(1e-12));
}

TEST_CASE("rescale_to_volume examples") {
  const BP a = rescale_to_volume(BP::constant(0.1), pi);
  CHECK(a.a0() == Approx(0.0).margin(1e-15));
  const BP b = rescale_to_volume(BP::mode(2, 0.1), pi);
  CHECK(volume(b) == Approx(pi).epsilon(1e-14));
  const BP c = rescale_to_volume(BP{}, 4 * pi);
  CHECK(c.a0() == Approx(1.0).epsilon(1e-15));
  // 1 + h' = mu (1 + h) pointwise
  const double mu = std::sqrt(pi / volume(BP::mode(2, 0.1)));
  for (double th : {0.0, 0.4, 2.0}) CHECK(b.radius(th) == Approx(mu * BP::mode(2, 0.1).radius(th)).epsilon(1e-15));
}

TEST_CASE("deformation path") {
  const BP h = BP::mode(3, 1.0);
  CHECK(path_domain(DeformationPath(BP::mode(3, 0.5), 0.0)) == BP::mode(3, 0.0));
  CHECK(path_domain(DeformationPath(BP::mode(3, 0.5), 1.0)) == BP::mode(3, 0.5));
  CHECK(path_domain(DeformationPath(BP::mode(3, 0.9), 0.5)) == BP::mode(3, 0.45));
  CHECK_THROWS_AS(DeformationPath(h, 0.5), InvalidDomain);  // r = 1 + cos 3 theta touches 0
  CHECK_THROWS_AS(DeformationPath(BP::mode(2, 0.1), 1.5), DomainError);
}

TEST_CASE("star-shape certificate") {
  CHECK(BP::mode(4, 0.9).is_star_shaped());
  CHECK_FALSE(BP::mode(4, 1.0).is_star_shaped());
  CHECK_FALSE(BP::constant(-1.2).is_star_shaped());
  // coefficient sum 1.1 fails the cheap test; min r = 0.5 + 0.6c + c^2 >= 0.41 with c = cos 2 theta
  CHECK((BP::mode(2, 0.6) + BP::mode(4, 0.5)).is_star_shaped());
  CHECK_THROWS_AS(volume(BP::constant(-1.5)), InvalidDomain);
  CHECK_THROWS_AS(perimeter(BP::mode(2, 1.5)), InvalidDomain);
  CHECK_THROWS_AS(BP(0.0, {std::nan("")}, {}), DomainError);
}

TEST_CASE("Fourier bookkeeping") {
  const BP h = BP::constant(0.1) + BP::mode(2, 0.3) + BP::mode(4, -0.2, true);
  CHECK(h.mode_mass(0) == Approx(2 * pi * 0.01));
  CHECK(h.mode_mass(2) == Approx(pi * 0.09));
  CHECK(h.mode_mass(4) == Approx(pi * 0.04));
  CHECK(h.mode_mass(3) == 0.0);
  CHECK(h.sup_bound() == Approx(0.6));
  CHECK(h(0.0) == Approx(0.4));
}
