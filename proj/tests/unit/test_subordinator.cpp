#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "levyou/errors.hpp"
#include "levyou/quadrature.hpp"
#include "levyou/rng.hpp"
#include "levyou/subordinator.hpp"

using namespace levyou;
using namespace levyou::subordinator;

namespace {

// stable(beta) density sampled onto a log-spaced table
IntensityMeasure stable_table(double beta, int nodes = 60) {
  std::vector<double> x, d;
  const double c = beta / std::tgamma(1.0 - beta);
  for (int i = 0; i < nodes; ++i) {
    const double xi = std::pow(10.0, -8.0 + 12.0 * i / (nodes - 1));
    x.push_back(xi);
    d.push_back(c * std::pow(xi, -1.0 - beta));
  }
  return IntensityMeasure::tabulated(x, d);
}

double mc_laplace(const SubordinatorSpec& spec, double r, double T, const PathOptions& o, int n, std::uint64_t seed,
                  double* se) {
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const auto p = simulate_path(spec, T, o, stream_id({seed, static_cast<std::uint64_t>(i)}));
    const double v = std::exp(-r * p.value(T));
    s += v;
    s2 += v * v;
  }
  const double m = s / n;
  *se = std::sqrt(std::max(0.0, s2 / n - m * m) / n);
  return m;
}

}  // namespace

TEST_CASE("laplace exponent examples") {
  CHECK(laplace_exponent(SubordinatorSpec::stable(0.5), 4.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(laplace_exponent(SubordinatorSpec::stable(0.3), 0.0) == 0.0);
  CHECK(laplace_exponent(SubordinatorSpec::drift_only(1.5), 2.0) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(laplace_exponent(SubordinatorSpec::compound_poisson({{0.3, 1.5}, {2.0, 0.5}}, 0.1), 0.0) == 0.0);
}

TEST_CASE("stable density normalization reproduces r^beta by quadrature") {
  // the measure's own density integrated against 1 - e^{-r xi}
  for (double beta : {0.25, 0.5, 0.9}) {
    const auto m = IntensityMeasure::stable(beta);
    for (double r : {0.5, 1.0, 3.0}) {
      const double q = m.integrate([r](double xi) { return -std::expm1(-r * xi); });
      CHECK(q == doctest::Approx(std::pow(r, beta)).epsilon(1e-7));
    }
  }
}

TEST_CASE("compound Poisson laplace exponent closed form") {
  const auto spec = SubordinatorSpec::compound_poisson({{2.0, 0.5}, {0.3, 1.5}}, 0.1);
  const double r = 1.7;
  const double expect = 0.1 * r + 0.5 * (1 - std::exp(-2.0 * r)) + 1.5 * (1 - std::exp(-0.3 * r));
  CHECK(laplace_exponent(spec, r) == doctest::Approx(expect).epsilon(1e-14));
  CHECK(spec.intensity().total_mass() == doctest::Approx(2.0));
}

TEST_CASE("tabulated stable density matches closed form") {
  const auto spec = SubordinatorSpec::tabulated(stable_table(0.5));
  for (double r : {0.5, 1.0, 2.0, 10.0}) CHECK(laplace_exponent(spec, r) == doctest::Approx(std::sqrt(r)).epsilon(1e-7));
  const auto& m = spec.intensity();
  CHECK(m.tail_mass(1e-4) == doctest::Approx(std::pow(1e-4, -0.5) / std::tgamma(0.5)).epsilon(1e-10));
  CHECK(m.truncated_first_moment(1e-4) == doctest::Approx(IntensityMeasure::stable(0.5).truncated_first_moment(1e-4)).epsilon(1e-10));
  CHECK(m.small_jump_index() == doctest::Approx(0.5));
}

TEST_CASE("tabulated inverse tail sampling has the right tail law") {
  const auto m = stable_table(0.7, 25);
  RandomStream rng(3, 0);
  const double eps = 1e-3, x = 0.05;
  const double p_expect = m.tail_mass(x) / m.tail_mass(eps);
  const int n = 200000;
  int hits = 0;
  for (int i = 0; i < n; ++i) hits += m.sample_above(eps, rng.uniform()) >= x;
  CHECK(std::fabs(hits / double(n) - p_expect) < 5 * std::sqrt(p_expect * (1 - p_expect) / n));
}

TEST_CASE("rejects invalid intensities") {
  // density xi^{-2.5} near zero: int xi rho diverges
  CHECK_THROWS_AS(SubordinatorSpec::tabulated(IntensityMeasure::tabulated({0.1, 1.0}, {std::pow(0.1, -2.5), 1.0})),
                  ConfigError);
  // flat upper tail: infinite mass at infinity
  CHECK_THROWS_AS(SubordinatorSpec::tabulated(IntensityMeasure::tabulated({0.1, 1.0}, {1.0, 1.0})), ConfigError);
  CHECK_THROWS_AS(SubordinatorSpec::stable(1.0), ConfigError);
  CHECK_THROWS_AS(SubordinatorSpec::drift_only(-1.0), ConfigError);
}

TEST_CASE("Sub(p) membership") {
  CHECK_FALSE(sub_p_membership(SubordinatorSpec::stable(0.75), 1.0).member);
  CHECK(std::isinf(sub_p_membership(SubordinatorSpec::stable(0.75), 1.0).certificate));
  const auto m = sub_p_membership(SubordinatorSpec::stable(0.25), 1.0);
  CHECK(m.member);
  CHECK(m.certificate == doctest::Approx(0.25 / std::tgamma(0.75) / 0.25));
  CHECK(sub_p_membership(SubordinatorSpec::compound_poisson({{0.5, 2.0}}), 0.1).member);
  CHECK_THROWS_AS(sub_p_membership(SubordinatorSpec::stable(0.5), 2.5), ConfigError);
}

TEST_CASE("finite variation diagnostic") {
  CHECK(finite_variation_diagnostic(SubordinatorSpec::stable(0.25)));
  CHECK_FALSE(finite_variation_diagnostic(SubordinatorSpec::stable(0.75)));
  CHECK(finite_variation_diagnostic(SubordinatorSpec::compound_poisson({{0.5, 2.0}})));
  CHECK_FALSE(finite_variation_diagnostic(SubordinatorSpec::drift_only(1.0)));
}

TEST_CASE("Kanter sampler matches the Levy distribution at beta = 1/2") {
  // beta = 1/2: S = 1/(2 G^2), P(S <= x) = erfc(1/(2 sqrt x))
  RandomStream rng(99, 0);
  const int n = 100000;
  std::vector<double> s(n);
  for (auto& v : s) v = sample_stable(0.5, std::numbers::pi * rng.uniform(), rng.exponential());
  std::sort(s.begin(), s.end());
  double d = 0;
  for (int i = 0; i < n; ++i) {
    const double f = std::erfc(0.5 / std::sqrt(s[i]));
    d = std::max({d, std::fabs(f - double(i) / n), std::fabs(f - double(i + 1) / n)});
  }
  CHECK(d < 1.63 / std::sqrt(double(n)));
}

TEST_CASE("drift-only path") {
  const auto p = simulate_path(SubordinatorSpec::drift_only(2.0), 3.0, {}, 1);
  CHECK(p.jumps.empty());
  CHECK(p.value(3.0) == doctest::Approx(6.0));
}

TEST_CASE("paths are deterministic, monotone and well formed") {
  PathOptions o;
  o.cutoff = 1e-3;
  for (const auto& spec : {SubordinatorSpec::stable(0.6), SubordinatorSpec::tabulated(stable_table(0.6)),
                           SubordinatorSpec::compound_poisson({{0.2, 3.0}, {1.5, 0.4}}, 0.5)}) {
    const auto a = simulate_path(spec, 2.0, o, 17);
    const auto b = simulate_path(spec, 2.0, o, 17);
    std::ostringstream sa, sb;
    write_path_csv(sa, a);
    write_path_csv(sb, b);
    CHECK(sa.str() == sb.str());
    double prev = 0.0, last = 0.0;
    for (const auto& j : a.jumps) {
      CHECK(j.time > prev);
      CHECK(j.time <= 2.0);
      CHECK(j.size > 0.0);
      prev = j.time;
    }
    for (int k = 0; k <= 200; ++k) {
      const double z = a.value(2.0 * k / 200);
      CHECK(z >= last);
      last = z;
    }
  }
}

TEST_CASE("exact stable sampler: E exp(-Z(1)) = e^{-1}") {
  double se;
  const double m = mc_laplace(SubordinatorSpec::stable(0.5), 1.0, 1.0, {}, 100000, 5, &se);
  CHECK(std::fabs(m - std::exp(-1.0)) < 3 * se);
}

TEST_CASE("exact stable sampler on a grid is exact at every node") {
  PathOptions o;
  o.grid = TimeGrid::refined_toward(1.0, 0.5, 1e-3, 1.3);
  double s = 0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) s += std::exp(-simulate_path(SubordinatorSpec::stable(0.7), 1.0, o, 1000 + i).value(0.5));
  CHECK(std::fabs(s / n - std::exp(-0.5)) < 0.01);
}

TEST_CASE("cutoff sampler on the tabulated stable density") {
  PathOptions o;
  o.cutoff = 1e-4;
  double se;
  const double m = mc_laplace(SubordinatorSpec::tabulated(stable_table(0.5)), 1.0, 1.0, o, 100000, 8, &se);
  CHECK(std::fabs(m - std::exp(-1.0)) < 1e-2);
}

TEST_CASE("cutoff sampler bias shrinks when the cutoff is halved") {
  // replacing small jumps by their mean lowers E exp(-Z) (Jensen); the bias shrinks with eps
  const auto spec = SubordinatorSpec::stable(0.8);
  PathOptions o;
  o.method = SamplingMethod::CutoffJumps;
  double se1, se2;
  o.cutoff = 0.2;
  const double m1 = mc_laplace(spec, 1.0, 1.0, o, 60000, 21, &se1);
  o.cutoff = 0.1;
  const double m2 = mc_laplace(spec, 1.0, 1.0, o, 60000, 21, &se2);
  const double exact = std::exp(-1.0);
  CHECK(m1 - exact < -3 * se1);
  CHECK(m2 - exact > m1 - exact);
  CHECK(std::fabs(m2 - exact) < std::fabs(m1 - exact));
}

TEST_CASE("moments over intervals agree across representations") {
  const auto st = IntensityMeasure::stable(0.5);
  const auto tb = stable_table(0.5);
  for (double k : {0.0, 0.5, 1.0, 2.0}) {
    CHECK(tb.moment(k, 0.01, 3.0) == doctest::Approx(st.moment(k, 0.01, 3.0)).epsilon(1e-10));
    // direct quadrature of the density
    const double q = levyou::integrate([&](double xi) { return std::pow(xi, k) * st.density(xi); }, 0.01, 3.0).value;
    CHECK(st.moment(k, 0.01, 3.0) == doctest::Approx(q).epsilon(1e-9));
  }
  CHECK(std::isinf(st.moment(0.25, 0.0, 1.0)));
  CHECK(st.moment(1.0, 0.0, 1e-4) == doctest::Approx(st.truncated_first_moment(1e-4)));
}
