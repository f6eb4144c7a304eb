#include <catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "shl/counterexample.hpp"

using Catch::Approx;
using namespace shl;
using oracle::pi;

namespace {

double sphere(int d) { return 2 * std::pow(pi, d / 2.0) / std::tgamma(d / 2.0); }
double ball(int d) { return sphere(d) / d; }

double torsion_energy(int d, double eps) {
  auto u = [&](double r) {
    if (d == 2) return (1 - r * r) / 4 - (1 - eps * eps) / (4 * std::log(eps)) * std::log(r);
    const double A = -(1 - eps * eps) / (2.0 * d * (std::pow(eps, 2 - d) - 1));
    return (1 - r * r) / (2.0 * d) + A * (std::pow(r, 2 - d) - 1);
  };
  return -0.5 * sphere(d) * oracle::simpson([&](double r) { return u(r) * std::pow(r, d - 1); }, eps, 1.0, 20000);
}

}  // namespace

TEST_CASE("perimeter gap identity") {
  for (int d : {2, 3, 4}) {
    for (double eps : {0.3, 0.1, 0.02}) {
      // 50 digits, so the subtraction of P(B_1) costs nothing.
      using oracle::mp;
      const mp e(eps);
      const mp mu = pow(1 - pow(e, d), mp(-1) / d);
      const double direct = static_cast<double>((pow(mu, d - 1) * (1 + pow(e, d - 1)) - 1) * mp(sphere(d)));
      CHECK(annulus_perimeter_gap(d, eps) == Approx(direct).epsilon(1e-13));
    }
  }
}

TEST_CASE("energy gap against the rescaled torsion integral") {
  for (int d : {2, 3, 4}) {
    for (double eps : {0.3, 0.1}) {
      const double mu = std::pow(1 - std::pow(eps, d), -1.0 / d);
      const double e_ball = -0.5 * sphere(d) / (2.0 * d) * (1.0 / d - 1.0 / (d + 2));
      const double direct = std::pow(mu, d + 2) * torsion_energy(d, eps) - e_ball;
      CHECK(annulus_energy_gap(d, eps) == Approx(direct).epsilon(1e-8));
    }
  }
}

TEST_CASE("rescaled annulus has the ball volume") {
  for (int d : {2, 3}) {
    const double eps = 0.2;
    const double mu = std::pow(1 - std::pow(eps, d), -1.0 / d);
    CHECK(std::pow(mu, d) * (1 - std::pow(eps, d)) == Approx(1.0).epsilon(1e-15));
    CHECK(annulus_l1_distance(d, eps) == Approx(ball(d) * (std::pow(mu, d) - 1 + std::pow(mu * eps, d))).epsilon(1e-13));
  }
}

TEST_CASE("small-hole asymptotic orders") {
  const AsymptoticSlopes s3 = asymptotic_slopes(3, 1e-3);
  CHECK(s3.p_order == Approx(2.0).margin(0.01));
  CHECK(s3.e_order == Approx(1.0).margin(0.01));
  const AsymptoticSlopes s4 = asymptotic_slopes(4, 1e-3);
  CHECK(s4.p_order == Approx(3.0).margin(0.01));
  CHECK(s4.e_order == Approx(2.0).margin(0.01));
  const AsymptoticSlopes s2 = asymptotic_slopes(2, 1e-4);
  CHECK(s2.p_order == Approx(1.0).margin(0.01));
  CHECK(s2.log_model_residual < 0.05);
  // d = 3: dP ~ eps^2 P(B_1) and the hole correction A (1/r - 1), A ~ -eps/6,
  // gives dE ~ eps P(B_1) / 72.
  CHECK(s3.p_constant == Approx(1.0).margin(1e-2));
  CHECK(s3.e_constant == Approx(1.0 / 72).epsilon(1e-2));
}

TEST_CASE("negative gamma produces a single crossover") {
  for (int d : {2, 3}) {
    for (double gamma : {-1.0, -0.3, -0.1, -0.03, -0.01}) {
      const AnnulusExperiment ex = run_annulus_experiment(d, gamma, log_grid(0.5, 1e-8, 4));
      INFO("d = " << d << " gamma = " << gamma);
      REQUIRE(ex.crossover.has_value());
      CHECK(ex.sign_changes == 1);
      for (const AnnulusRow& r : ex.rows) {
        if (r.eps <= *ex.crossover) {
          CHECK(r.deficit < 0.0);
          CHECK(r.l1_distance < 0.05 * ex.ball_volume);
        }
      }
    }
  }
}

TEST_CASE("three-dimensional counterexample at gamma = -0.1") {
  const AnnulusExperiment ex = run_annulus_experiment(3, -0.1, log_grid(0.1, 1e-6, 4));
  for (const AnnulusRow& r : ex.rows) {
    if (r.eps <= 1e-3) CHECK(r.deficit < 0.0);
  }
  // eps^2 = |gamma| eps / 72 at leading order; the grid has four points per decade.
  REQUIRE(ex.crossover);
  const double root = 0.1 / 72;
  CHECK(*ex.crossover <= root * 1.01);
  CHECK(*ex.crossover > root / std::pow(10.0, 0.25) / 1.01);
}

TEST_CASE("positive gamma keeps the deficit positive") {
  for (int d : {2, 3}) {
    const AnnulusExperiment ex = run_annulus_experiment(d, 0.5, log_grid(0.5, 1e-6, 4));
    CHECK_FALSE(ex.crossover.has_value());
    for (const AnnulusRow& r : ex.rows) CHECK(r.deficit > 0.0);
  }
}

TEST_CASE("log grid") {
  const auto g = log_grid(0.1, 1e-3, 4);
  REQUIRE(g.size() == 9);
  CHECK(g.front() == Approx(0.1));
  CHECK(g.back() == Approx(1e-3));
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] < g[i - 1]);
  CHECK_THROWS_AS(log_grid(1e-3, 0.1, 4), DomainError);
  CHECK_THROWS_AS(run_annulus_experiment(3, -0.1, {0.7}), DomainError);
}
