#include <doctest.h>

#include <cmath>
#include <vector>

#include "levyou/errors.hpp"
#include "levyou/jumpdecomp.hpp"
#include "levyou/stats.hpp"

using namespace levyou;
using namespace levyou::jumpdecomp;
using cylnoise::CylindricalWienerSpec;
using cylnoise::LevyNoiseSpec;
using subordinator::SubordinatorSpec;

namespace {

subordinator::PathOptions cutoff_opts(double eps) {
  subordinator::PathOptions o;
  o.method = subordinator::SamplingMethod::CutoffJumps;
  o.cutoff = eps;
  return o;
}

}  // namespace

TEST_CASE("Y splits into small and large parts") {
  const auto modes = ModeSet::line(6);
  LevyNoiseSpec spec{CylindricalWienerSpec::hilbert_scale(modes, 0.0), SubordinatorSpec::stable(0.6, 0.3)};
  const auto U = SpaceSpec::unit(6, 2.0);
  const auto grid = TimeGrid::uniform(2.0, 40);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto z = subordinator::simulate_path(spec.subordinator, 2.0, cutoff_opts(1e-5), seed);
    const auto y = sample_noise_path(spec, z, grid, seed);
    const auto parts = split(y, U, 1.0);
    CHECK(parts.small.jumps.size() + parts.large.jumps.size() == y.jumps.size());
    for (const auto& j : parts.large.jumps) CHECK(j.size >= 1.0);
    for (const auto& j : parts.small.jumps) CHECK(j.size < 1.0);
    for (std::size_t node : {0u, 7u, 20u, 40u}) {
      const auto full = y.value(node);
      const auto y1 = parts.small.value(node);
      const auto y2 = large_value(parts.large, grid[node], 6);
      for (std::size_t m = 0; m < 6; ++m) CHECK(full[m] == doctest::Approx(y1[m] + y2[m]).epsilon(1e-13));
    }
  }
}

TEST_CASE("marks are consistent across truncations") {
  const auto z = subordinator::simulate_path(SubordinatorSpec::stable(0.5), 1.0, cutoff_opts(1e-4), 9);
  LevyNoiseSpec a{CylindricalWienerSpec::unit(3), SubordinatorSpec::stable(0.5)};
  LevyNoiseSpec b{CylindricalWienerSpec::unit(8), SubordinatorSpec::stable(0.5)};
  const auto grid = TimeGrid::uniform(1.0, 4);
  const auto ya = sample_noise_path(a, z, grid, 3);
  const auto yb = sample_noise_path(b, z, grid, 3);
  REQUIRE(ya.jumps.size() == yb.jumps.size());
  for (std::size_t k = 0; k < ya.jumps.size(); ++k)
    for (std::size_t m = 0; m < 3; ++m) CHECK(ya.jumps[k].mark[m] == yb.jumps[k].mark[m]);
}

TEST_CASE("integral over large jumps matches a direct sum") {
  LevyNoiseSpec spec{CylindricalWienerSpec::unit(4), SubordinatorSpec::stable(0.5)};
  const auto U = SpaceSpec::unit(4, 2.0);
  const auto z = subordinator::simulate_path(spec.subordinator, 3.0, cutoff_opts(1e-4), 21);
  const auto y = sample_noise_path(spec, z, TimeGrid::uniform(3.0, 3), 21);
  const auto parts = split(y, U, 0.5);
  REQUIRE(!parts.large.jumps.empty());
  const DiagonalIntegrand psi = [](double s, std::span<double> d) {
    for (std::size_t m = 0; m < d.size(); ++m) d[m] = std::exp(-(m + 1.0) * s);
  };
  const auto got = integrate_large(psi, parts.large, 2.0, 4);
  std::vector<double> want(4, 0.0);
  for (const auto& j : y.jumps) {
    if (j.time > 2.0 || U.norm(j.mark) < 0.5) continue;
    for (std::size_t m = 0; m < 4; ++m) want[m] += std::exp(-(m + 1.0) * j.time) * j.mark[m];
  }
  for (std::size_t m = 0; m < 4; ++m) CHECK(got[m] == doctest::Approx(want[m]).epsilon(1e-14));
}

TEST_CASE("compensator of the small-jump integral vanishes") {
  LevyNoiseSpec spec{CylindricalWienerSpec::unit(5), SubordinatorSpec::stable(0.7, 0.5)};
  const auto U = SpaceSpec::unit(5, 2.0);
  const auto grid = TimeGrid::uniform(1.0, 16);
  const auto z = subordinator::simulate_path(spec.subordinator, 1.0, cutoff_opts(1e-5), 4);
  const auto parts = split(sample_noise_path(spec, z, grid, 4), U);
  const DiagonalIntegrand psi = [](double s, std::span<double> d) {
    for (auto& v : d) v = 1.0 + s;
  };
  const auto r = integrate_small_compensated(psi, parts.small, spec, U, 1.0);
  CHECK(r.compensator_norm <= 1e-12 * std::max(r.term_scale, 1.0));
  // with Psi = identity the jump part is the sum of small marks
  const DiagonalIntegrand id = [](double, std::span<double> d) {
    for (auto& v : d) v = 1.0;
  };
  const auto r1 = integrate_small_compensated(id, parts.small, spec, U, 1.0);
  std::vector<double> s(5, 0.0);
  for (const auto& j : parts.small.jumps)
    for (std::size_t m = 0; m < 5; ++m) s[m] += j.mark[m];
  for (std::size_t m = 0; m < 5; ++m) CHECK(r1.jump_part[m] == doctest::Approx(s[m]).epsilon(1e-13));
}

TEST_CASE("number of large jumps is Poisson with rate nu(|u| >= 1)") {
  LevyNoiseSpec spec{CylindricalWienerSpec::unit(4), SubordinatorSpec::stable(0.5)};
  const auto U = SpaceSpec::unit(4, 2.0);
  const double T = 2.0;
  const double rate = cylnoise::intensity_measure_functional(spec, cylnoise::RadialTest::at_least(1.0), U);
  const std::size_t n = 3000;
  std::vector<std::uint64_t> counts(n);
  const auto grid = TimeGrid::uniform(T, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const auto z = subordinator::simulate_path(spec.subordinator, T, cutoff_opts(1e-4), 1000 + i);
    counts[i] = split(sample_noise_path(spec, z, grid, 1000 + i), U).large.jumps.size();
  }
  CHECK(ks_poisson(counts, T * rate) < ks_critical_001(n));
}

TEST_CASE("Poisson moment inequality for p <= 1") {
  const auto E = SpaceSpec::unit(2, 1.0);
  SUBCASE("single piece with p = 1 is an identity") {
    StepIntegrand f{{{{1.0, 0.0}, 2.0}}};
    const auto r = verify_moment_inequality_p_le_1(f, 1.0, E, 200000, 5);
    CHECK(r.rhs == doctest::Approx(2.0));
    CHECK(std::fabs(r.lhs - 2.0) < 4 * r.stderr_);
    CHECK(r.verdict);
  }
  SUBCASE("two pieces, p = 1/2, against an exact series") {
    StepIntegrand f{{{{1.0, 0.5}, 0.7}, {{-0.3, 1.0}, 1.3}}};
    // E|N1 f1 + N2 f2|_1^{1/2} by summing the Poisson probabilities
    double exact = 0.0;
    for (int a = 0; a < 40; ++a)
      for (int b = 0; b < 40; ++b) {
        const double pr = std::exp(a * std::log(0.7) - 0.7 - std::lgamma(a + 1.0) + b * std::log(1.3) - 1.3 -
                                   std::lgamma(b + 1.0));
        const double x = a * 1.0 - 0.3 * b, y = a * 0.5 + b * 1.0;
        exact += pr * std::sqrt(std::fabs(x) + std::fabs(y));
      }
    const auto r = verify_moment_inequality_p_le_1(f, 0.5, E, 200000, 6);
    CHECK(std::fabs(r.lhs - exact) < 4 * r.stderr_);
    CHECK(r.rhs == doctest::Approx(std::sqrt(1.5) * 0.7 + std::sqrt(1.3) * 1.3));
    CHECK(r.verdict);
    CHECK(r.lhs <= r.rhs);
  }
  CHECK_THROWS_AS(verify_moment_inequality_p_le_1({{{{1.0, 0.0}, 1.0}}}, 1.5, E, 10, 0), ConfigError);
}

TEST_CASE("compensated Poisson moment inequality in type-p spaces") {
  SUBCASE("p = 2 in Hilbert space is the variance identity") {
    const auto E = SpaceSpec::unit(1, 2.0);
    StepIntegrand f{{{{1.0}, 3.0}}};
    const auto r = verify_moment_inequality_type_p(f, 2.0, E, 200000, 8);
    CHECK(r.variance_identity);
    CHECK(r.type_constant == doctest::Approx(1.0));
    CHECK(r.verdict);
  }
  SUBCASE("l^2 with p = 1.5") {
    const auto E = SpaceSpec::unit(3, 2.0);
    StepIntegrand f{{{{1.0, 0.0, 0.2}, 0.4}, {{0.0, 2.0, -1.0}, 1.1}, {{0.5, 0.5, 0.5}, 2.5}}};
    const auto r = verify_moment_inequality_type_p(f, 1.5, E, 100000, 9);
    CHECK(r.type_constant >= 1.0);
    CHECK(r.verdict);
  }
  SUBCASE("l^1 is rejected") {
    CHECK_THROWS_AS(verify_moment_inequality_type_p({{{{1.0}, 1.0}}}, 1.5, SpaceSpec::unit(1, 1.0), 10, 0),
                    ConfigError);
  }
}

TEST_CASE("type constant of a Hilbert space at p = 2 is one") {
  // E|sum eps_i x_i|^2 = sum |x_i|^2 exactly for every family
  const auto E = SpaceSpec::unit(4, 2.0);
  CHECK(estimate_type_constant({{1, 2, 0, 0}, {0, 1, 1, 0}}, 2.0, E, 32, 1) == doctest::Approx(1.0).epsilon(1e-12));
}
