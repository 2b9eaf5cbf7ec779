#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "levyou/errors.hpp"
#include "levyou/quadrature.hpp"
#include "levyou/rng.hpp"
#include "levyou/spectral_ou.hpp"

using namespace levyou;
using namespace levyou::spectral_ou;
using cylnoise::CylindricalWienerSpec;
using cylnoise::LevyNoiseSpec;
using subordinator::SubordinatorPath;
using subordinator::SubordinatorSpec;

namespace {

// exhaustive sup of e^{-lambda t} b a^{r/q}, first maximizer
std::pair<double, std::size_t> scan(const std::vector<double>& lam, double t, double alpha, double beta, double r,
                                    double q) {
  double best = -1.0;
  std::size_t arg = 0;
  for (std::size_t j = 0; j < lam.size(); ++j) {
    const double v = std::exp(-lam[j] * t) * std::pow(lam[j], beta) * std::pow(std::pow(lam[j], alpha), r / q);
    if (v > best) {
      best = v;
      arg = j;
    }
  }
  return {best, arg};
}

}  // namespace

TEST_CASE("operator eigenvalues") {
  const auto op = SpectralOperator::cube(2, 4, 0.75);
  REQUIRE(op.size() == 16);
  for (std::size_t j = 0; j < op.size(); ++j) {
    const auto n = op.modes()->multi_index(j);
    CHECK(op.eigenvalue(j) == doctest::Approx(std::pow(double(n[0] * n[0] + n[1] * n[1]), 0.75)));
    if (j) CHECK(op.eigenvalue(j) >= op.eigenvalue(j - 1));
  }
  CHECK_THROWS_AS(SpectralOperator::from_eigenvalues({2.0, 1.0}), ConfigError);
  CHECK_THROWS_AS(SpectralOperator::from_eigenvalues({0.0, 1.0}), ConfigError);
}

TEST_CASE("semigroup norm with unit weights is e^{-lambda_1 t}") {
  const auto op = SpectralOperator::cube(1, 50, 1.0);
  const auto U = SpaceSpec::unit(50, 2.0), E = SpaceSpec::unit(50, 3.0);
  for (double t : {1e-3, 0.1, 2.0}) {
    const auto s = semigroup_norm(op, U, E, t);
    CHECK(s.maximizer == 0);
    CHECK(s.value == doctest::Approx(std::exp(-t)));
  }
}

TEST_CASE("semigroup norm: analytic maximizer equals an exhaustive scan") {
  const auto op = SpectralOperator::cube(1, 100000, 1.0);
  RandomStream rng(7, 1);
  for (int i = 0; i < 20; ++i) {
    const double t = std::pow(10.0, -6.0 + 6.0 * rng.uniform());
    const double alpha = 0.5 * rng.uniform(), beta = 0.6 * rng.uniform();
    const double r = 1.0 + rng.uniform(), q = 1.0 + 2.0 * rng.uniform();
    const auto U = SpaceSpec::power_weights(op.eigenvalues(), -alpha, r);
    const auto E = SpaceSpec::power_weights(op.eigenvalues(), beta, q);
    const auto s = semigroup_norm(op, U, E, t);
    const auto [v, arg] = scan(op.eigenvalues(), t, alpha, beta, r, q);
    CHECK(s.power_law);
    CHECK(s.maximizer == arg);
    CHECK(std::fabs(s.value - v) <= 1e-12 * v);
    CHECK(s.value <= s.envelope * (1 + 1e-12));
  }
}

TEST_CASE("semigroup norm: generic weights are scanned") {
  const auto op = SpectralOperator::cube(1, 200, 1.0);
  std::vector<double> b(200);
  for (std::size_t j = 0; j < 200; ++j) b[j] = 1.0 + std::sin(double(j)) * 0.5 + 0.01 * j;
  const SpaceSpec E(2.0, b), U = SpaceSpec::unit(200);
  const auto s = semigroup_norm(op, U, E, 0.01);
  CHECK(!s.power_law);
  double best = 0;
  for (std::size_t j = 0; j < 200; ++j) best = std::max(best, std::exp(-op.eigenvalue(j) * 0.01) * b[j]);
  CHECK(s.value == doctest::Approx(best).epsilon(1e-14));
}

TEST_CASE("semigroup norm slope on a log grid") {
  const auto op = SpectralOperator::cube(1, 1000000, 1.0);
  for (auto [alpha, beta, r, q] : {std::array{0.25, 0.5, 2.0, 2.0}, std::array{0.4, 0.1, 1.5, 3.0}}) {
    const auto U = SpaceSpec::power_weights(op.eigenvalues(), -alpha, r);
    const auto E = SpaceSpec::power_weights(op.eigenvalues(), beta, q);
    const auto c = check_semigroup_slope(op, U, E);
    CHECK(c.expected == doctest::Approx(-(beta + r / q * alpha)));
    CHECK(c.pass);
    for (std::size_t i = 0; i < c.times.size(); ++i)
      CHECK(c.values[i] <= std::exp(c.expected) * std::pow(-c.expected, -c.expected) * std::pow(c.times[i], c.expected) *
                               (1 + 1e-12));
  }
}

TEST_CASE("radonifying certificate") {
  const auto heat = SpectralOperator::cube(1, 1000, 1.0);
  CHECK(check_radonifying(heat, 1.0, 1.0).radonifying);       // sum n^{-2}
  CHECK(!check_radonifying(heat, 2.0, 0.25).radonifying);     // harmonic
  CHECK(!check_radonifying(heat, 2.0, 0.1).radonifying);
  const auto v = check_radonifying(heat, 1.0, 1.0);
  CHECK(v.analytic);
  CHECK(v.partial_sum + v.tail_bound >= std::numbers::pi * std::numbers::pi / 6.0);
  CHECK(v.partial_sum < std::numbers::pi * std::numbers::pi / 6.0);
  // U given by weights
  CHECK(check_radonifying(SpaceSpec::power_weights(heat.eigenvalues(), -1.0, 1.0), heat).radonifying);
  CHECK(!check_radonifying(SpaceSpec::power_weights(heat.eigenvalues(), -0.25, 2.0), heat).radonifying);
  // user sequence lambda_n = n^2: extrapolated growth
  std::vector<double> lam(4000);
  for (std::size_t j = 0; j < lam.size(); ++j) lam[j] = double(j + 1) * double(j + 1);
  const auto user = SpectralOperator::from_eigenvalues(lam);
  CHECK(!check_radonifying(user, 1.0, 0.5).analytic);
  CHECK(!check_radonifying(user, 1.0, 0.5).radonifying);
  CHECK(check_radonifying(user, 1.0, 0.6).radonifying);
  CHECK(!check_radonifying(user, 1.0, 0.4).radonifying);
  // d = 2, gamma = 1: rho alpha > 1 needed
  const auto sq = SpectralOperator::cube(2, 30, 1.0);
  CHECK(!check_radonifying(sq, 2.0, 0.5).radonifying);
  CHECK(check_radonifying(sq, 2.0, 0.55).radonifying);
}

TEST_CASE("exponents for the radonifying setting") {
  for (double p : {0.2, 0.5, 0.9}) {
    const auto e = choose_radonifying_exponents(p, 1.0, 1);
    const auto op = SpectralOperator::cube(1, 100, 1.0);
    CHECK(e.r * e.alpha < 1.0 / p);
    CHECK(check_radonifying(op, e.r, e.alpha).radonifying);
    // the wrong side r alpha < d / (2 gamma) fails
    CHECK(!check_radonifying(op, e.r, 0.45 / e.r).radonifying);
  }
  CHECK_THROWS_AS(choose_radonifying_exponents(1.0, 1.0, 1), ConfigError);
  CHECK_THROWS_AS(choose_radonifying_exponents(0.6, 0.25, 1), ConfigError);
}

TEST_CASE("convolution variance closed forms") {
  const auto op = SpectralOperator::cube(1, 6, 1.0);
  SubordinatorPath one;
  one.horizon = 2.0;
  one.jumps = {{0.5, 0.8}};
  const auto v = convolution_variance(op, one, 1.5);
  for (std::size_t j = 0; j < 6; ++j) CHECK(v[j] == doctest::Approx(std::exp(-2.0 * op.eigenvalue(j)) * 0.8));
  SubordinatorPath drift;
  drift.horizon = 50.0;
  drift.drift_slope = 1.0;
  const auto s = convolution_variance(op, drift, 50.0);
  for (std::size_t j = 0; j < 6; ++j) CHECK(s[j] == doctest::Approx(0.5 / op.eigenvalue(j)));
  // nonincreasing in lambda for a random path
  const auto z = subordinator::simulate_path(SubordinatorSpec::stable(0.6, 0.2), 1.0, {}, 3);
  const auto r = convolution_variance(SpectralOperator::cube(1, 64, 1.0), z, 1.0);
  for (std::size_t j = 1; j < r.size(); ++j) CHECK(r[j] <= r[j - 1]);
  CHECK_THROWS_AS(convolution_variance(op, one, 3.0), ConfigError);
}

TEST_CASE("stationary variance of the drift-only convolution") {
  const auto op = SpectralOperator::cube(1, 3, 1.0);
  LevyNoiseSpec noise{CylindricalWienerSpec(std::vector<double>{1.0, 2.0, 0.5}), SubordinatorSpec::drift_only(1.5)};
  SubordinatorPath z;
  z.horizon = 30.0;
  z.drift_slope = 1.5;
  const int m = 40000;
  std::vector<double> s2(3, 0.0);
  for (int i = 0; i < m; ++i) {
    const auto x = sample_convolution(op, noise, z, 30.0, 100 + i);
    for (std::size_t j = 0; j < 3; ++j) s2[j] += x.coefficients[j] * x.coefficients[j];
  }
  for (std::size_t j = 0; j < 3; ++j) {
    const double w = noise.wiener.weights()[j];
    const double exact = 1.5 / (w * w) / (2.0 * op.eigenvalue(j));
    CHECK(std::fabs(s2[j] / m - exact) < 4.0 * exact * std::sqrt(2.0 / m));
  }
}

TEST_CASE("OU characteristic functional oracle") {
  const auto op = SpectralOperator::cube(1, 8, 1.0);
  const auto modes = ModeSet::line(8);
  SUBCASE("phi = 0") {
    LevyNoiseSpec n{CylindricalWienerSpec::unit(8), SubordinatorSpec::stable(0.7)};
    CHECK(charfn_oracle(op, n, std::vector<double>(8, 0.0), 1.0) == 1.0);
  }
  SUBCASE("single mode, drift-only") {
    LevyNoiseSpec n{CylindricalWienerSpec::hilbert_scale(modes, 0.3), SubordinatorSpec::drift_only(0.8)};
    for (std::size_t j : {0u, 3u, 7u})
      for (double t : {0.05, 1.0, 4.0}) {
        std::vector<double> phi(8, 0.0);
        phi[j] = 1.3;
        const double w = n.wiener.weights()[j], l = op.eigenvalue(j);
        const double exact = std::exp(-0.8 * 1.69 * w * w * -std::expm1(-2.0 * l * t) / (4.0 * l));
        CHECK(std::fabs(charfn_oracle(op, n, phi, t) - exact) < 1e-8);
      }
  }
  SUBCASE("stable exponent") {
    const double alpha = 1.4;
    LevyNoiseSpec n{CylindricalWienerSpec::hilbert_scale(modes, 0.5), SubordinatorSpec::stable(alpha / 2)};
    std::vector<double> phi{0.5, -0.3, 0.2, 0.1, 0.0, 0.05, 0.0, 0.02};
    const double t = 0.7;
    // (1/2)^{alpha/2} int_0^t |S(s) phi|_H^alpha ds by tanh-sinh
    auto h = [&](double s) {
      double a = 0.0;
      for (std::size_t j = 0; j < 8; ++j) {
        const double w = n.wiener.weights()[j];
        a += std::exp(-2.0 * op.eigenvalue(j) * s) * w * w * phi[j] * phi[j];
      }
      return std::pow(a, alpha / 2);
    };
    const double expo = std::pow(0.5, alpha / 2) * integrate_singular(h, 0.0, t, 1e-12).value;
    CHECK(charfn_oracle(op, n, phi, t) == doctest::Approx(std::exp(-expo)).epsilon(1e-9));
  }
}

TEST_CASE("empirical OU characteristic functional, stable(0.9)") {
  const auto op = SpectralOperator::cube(1, 16, 1.0);
  LevyNoiseSpec n{CylindricalWienerSpec::unit(16), SubordinatorSpec::stable(0.9)};
  RandomStream rng(11, 0);
  for (int k = 0; k < 3; ++k) {
    std::vector<double> phi(16);
    for (auto& v : phi) v = 0.8 * rng.normal();
    const double t = k == 0 ? 0.5 : 1.0;
    const auto e = empirical_charfn(op, n, phi, t, 20000, 40 + k);
    CHECK(std::fabs(e.mean - charfn_oracle(op, n, phi, t)) < 4.0 * e.stderr_);
  }
}

TEST_CASE("trajectory: deterministic decay and cell integrals") {
  const auto op = SpectralOperator::cube(1, 4, 1.0);
  LevyNoiseSpec n{CylindricalWienerSpec::unit(4), SubordinatorSpec::drift_only(0.0)};
  SubordinatorPath z;
  z.horizon = 1.0;
  const auto grid = TimeGrid::uniform(1.0, 10);
  std::vector<double> x0{1.0, -2.0, 0.5, 3.0};
  const auto tr = sample_trajectory(op, n, z, grid, 1, x0);
  for (std::size_t k = 0; k <= 10; ++k)
    for (std::size_t j = 0; j < 4; ++j) CHECK(tr.states[k][j] == doctest::Approx(x0[j] * std::exp(-op.eigenvalue(j) * grid[k])));
  for (std::size_t k = 0; k < 10; ++k)
    for (std::size_t j = 0; j < 4; ++j) {
      const double l = op.eigenvalue(j);
      const double exact = x0[j] * (std::exp(-l * grid[k]) - std::exp(-l * grid[k + 1])) / l;
      CHECK(tr.cell_integrals[k][j] == doctest::Approx(exact).epsilon(1e-12));
    }
}

TEST_CASE("trajectory: joint law of endpoint and cell integral") {
  // one cell of length h, drift-only; Var A, Var B, Cov by quadrature
  const double h = 0.7, l = 2.5;
  const auto op = SpectralOperator::from_eigenvalues({l});
  LevyNoiseSpec n{CylindricalWienerSpec::unit(1), SubordinatorSpec::drift_only(1.0)};
  SubordinatorPath z;
  z.horizon = h;
  z.drift_slope = 1.0;
  auto e = [&](double u) { return std::exp(-l * u); };
  auto g = [&](double u) { return (1.0 - std::exp(-l * u)) / l; };
  const double va = integrate([&](double u) { return e(u) * e(u); }, 0, h).value;
  const double vb = integrate([&](double u) { return g(u) * g(u); }, 0, h).value;
  const double cab = integrate([&](double u) { return e(u) * g(u); }, 0, h).value;
  const int m = 100000;
  double sa = 0, sb = 0, sab = 0;
  for (int i = 0; i < m; ++i) {
    const auto tr = sample_trajectory(op, n, z, TimeGrid::uniform(h, 1), 500 + i);
    const double a = tr.states[1][0], b = tr.cell_integrals[0][0];
    sa += a * a;
    sb += b * b;
    sab += a * b;
  }
  CHECK(std::fabs(sa / m - va) < 4 * va * std::sqrt(2.0 / m));
  CHECK(std::fabs(sb / m - vb) < 4 * vb * std::sqrt(2.0 / m));
  CHECK(std::fabs(sab / m - cab) < 4 * std::sqrt((va * vb + cab * cab) / m));
}

TEST_CASE("trajectory draws agree across truncations") {
  const auto z = subordinator::simulate_path(SubordinatorSpec::stable(0.5), 1.0, {}, 5);
  const auto big = SpectralOperator::cube(1, 32, 1.0);
  const auto small = big.prefix(8);
  LevyNoiseSpec nb{CylindricalWienerSpec::unit(32), SubordinatorSpec::stable(0.5)};
  LevyNoiseSpec ns{CylindricalWienerSpec::unit(8), SubordinatorSpec::stable(0.5)};
  const auto grid = TimeGrid::uniform(1.0, 16);
  const auto a = sample_trajectory(big, nb, z, grid, 9);
  const auto b = sample_trajectory(small, ns, z, grid, 9);
  for (std::size_t k = 0; k <= 16; ++k)
    for (std::size_t j = 0; j < 8; ++j) CHECK(a.states[k][j] == b.states[k][j]);
}

TEST_CASE("regularity exponent bound") {
  const auto heat = SpectralOperator::cube(1, 16, 1.0);
  LevyNoiseSpec cauchy{CylindricalWienerSpec::unit(16), SubordinatorSpec::stable(0.5)};
  LevyNoiseSpec gauss{CylindricalWienerSpec::unit(16), SubordinatorSpec::drift_only(1.0)};
  CHECK(regularity_exponent_bound(heat, cauchy, RegularityTarget::holder(1.0)).critical == doctest::Approx(1.5));
  const auto g = regularity_exponent_bound(heat, gauss, RegularityTarget::holder(0.4));
  CHECK(g.critical == doctest::Approx(0.5));
  CHECK(g.admissible);
  CHECK(!regularity_exponent_bound(heat, gauss, RegularityTarget::holder(0.5)).admissible);
  // nonincreasing in alpha on (1,2)
  double prev = 1e9;
  for (double a = 1.05; a < 2.0; a += 0.1) {
    LevyNoiseSpec s{CylindricalWienerSpec::unit(16), SubordinatorSpec::stable(a / 2)};
    const double c = regularity_exponent_bound(heat, s, RegularityTarget::holder(0.0)).critical;
    CHECK(c <= prev);
    prev = c;
  }
  // d >= 2 gamma / (alpha v 1): empty range
  const auto sq = SpectralOperator::cube(2, 4, 0.5);
  LevyNoiseSpec s2{CylindricalWienerSpec::unit(16), SubordinatorSpec::stable(0.5)};
  const auto e = regularity_exponent_bound(sq, s2, RegularityTarget::holder(0.0));
  CHECK(e.empty);
  CHECK(!e.admissible);
  // compound Poisson needs a declared p
  LevyNoiseSpec cp{CylindricalWienerSpec::unit(16), SubordinatorSpec::compound_poisson({{0.5, 1.0}})};
  CHECK_THROWS_AS(regularity_exponent_bound(heat, cp, RegularityTarget::holder(0.1)), ConfigError);
  CHECK(regularity_exponent_bound(heat, cp, RegularityTarget::holder(0.1), 0.5).critical == doctest::Approx(1.5));
  CHECK(regularity_exponent_bound(heat, cp, RegularityTarget::sobolev(1.9), 0.5).admissible);
}
