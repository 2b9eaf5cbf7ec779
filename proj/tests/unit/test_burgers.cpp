#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "levyou/burgers.hpp"
#include "levyou/errors.hpp"
#include "levyou/rng.hpp"
#include "levyou/stats.hpp"

using namespace levyou;
using namespace levyou::burgers;

namespace {

constexpr double pi = std::numbers::pi;
const double s2 = std::numbers::sqrt2;

// 20-point Gauss-Legendre on 256 panels of [0,1]
template <class F>
double composite_gauss(F f) {
  double s = 0.0;
  for (int i = 0; i < 256; ++i) s += boost::math::quadrature::gauss<double, 20>::integrate(f, i / 256.0, (i + 1) / 256.0);
  return s;
}

// v*(t,x) = e^{-t} sin(pi x) driven through z = c cos(t) x(1-x); g is assembled
// from sine coefficients of its spatial profiles, computed by quadrature.
struct Manufactured {
  double c = 2.0;
  std::vector<double> r;  // coefficients of pi cos(pi x) x(1-x) + sin(pi x)(1-2x)

  explicit Manufactured(std::size_t K) : r(K) {
    for (std::size_t k = 1; k <= K; ++k)
      r[k - 1] = composite_gauss([k](double x) {
        const double p = pi * std::cos(pi * x) * x * (1 - x) + std::sin(pi * x) * (1 - 2 * x);
        return p * s2 * std::sin(k * pi * x);
      });
  }

  SpectralField z() const {
    return [c = c](double t, std::span<double> out) {
      for (std::size_t k = 1; k <= out.size(); ++k)
        out[k - 1] = k % 2 ? c * std::cos(t) * 4 * s2 / std::pow(k * pi, 3) : 0.0;
    };
  }
  SpectralField g() const {
    return [this](double t, std::span<double> out) {
      for (std::size_t j = 0; j < out.size(); ++j) out[j] = c * std::exp(-t) * std::cos(t) * r[j];
      out[0] += (pi * pi - 1) * std::exp(-t) / s2;
      if (out.size() > 1) out[1] += std::exp(-2 * t) * pi / 2 / s2;
    };
  }
  double error(const BurgersTrajectory& tr) const {
    const auto& v = tr.states.back();
    const double t = tr.disc.horizon;
    double e = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      const double x = v[j] - (j == 0 ? std::exp(-t) / s2 : 0.0);
      e += x * x;
    }
    return std::sqrt(e);
  }
};

double order(const std::vector<double>& h, const std::vector<double>& err) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < h.size(); ++i) {
    lx.push_back(std::log(h[i]));
    ly.push_back(std::log(err[i]));
  }
  return fit_line(lx, ly).slope;
}

}  // namespace

TEST_CASE("manufactured solution: first order in dt") {
  const Manufactured ms(127);
  std::vector<double> h, err;
  for (double dt : {0.02, 0.01, 0.005, 0.0025}) {
    const auto tr = solve_modified_burgers(std::vector<double>{1 / s2}, ms.z(), ms.g(), {0.5, dt, 128});
    h.push_back(dt);
    err.push_back(ms.error(tr));
  }
  const double p = order(h, err);
  MESSAGE("dt order " << p << " errors " << err[0] << " .. " << err.back());
  CHECK(p >= 1.0 - 0.05);
}

// v*(t,x) = e^{-t} x(1-x) with z = c cos(t) sin(pi x): every odd mode is
// active, so truncation to K modes is visible in the error.
struct ManufacturedPoly {
  double c = 1.5;
  std::size_t K;
  std::vector<double> a, b, q, w;  // x(1-x), constant 2, [x(1-x) sin(pi x)]_x, x(1-x)(1-2x)

  explicit ManufacturedPoly(std::size_t K_) : K(K_), a(K), b(K), q(K), w(K) {
    for (std::size_t k = 1; k <= K; ++k) {
      a[k - 1] = k % 2 ? 4 * s2 / std::pow(k * pi, 3) : 0.0;
      b[k - 1] = k % 2 ? 4 * s2 / (k * pi) : 0.0;
      q[k - 1] = composite_gauss([k](double x) {
        const double d = (1 - 2 * x) * std::sin(pi * x) + x * (1 - x) * pi * std::cos(pi * x);
        return d * s2 * std::sin(k * pi * x);
      });
      w[k - 1] = composite_gauss([k](double x) { return x * (1 - x) * (1 - 2 * x) * s2 * std::sin(k * pi * x); });
    }
  }
  std::vector<double> v0() const { return a; }
  SpectralField z() const {
    return [c = c](double t, std::span<double> out) {
      std::fill(out.begin(), out.end(), 0.0);
      out[0] = c * std::cos(t) / s2;
    };
  }
  SpectralField g() const {
    return [this](double t, std::span<double> out) {
      for (std::size_t j = 0; j < out.size(); ++j)
        out[j] = std::exp(-t) * (b[j] - a[j]) + c * std::exp(-t) * std::cos(t) * q[j] + std::exp(-2 * t) * w[j];
    };
  }
  // full L^2 error including the modes beyond K; |x(1-x)|^2 = 1/30
  double error(const BurgersTrajectory& tr) const {
    const double e = std::exp(-tr.disc.horizon);
    double d = 0.0, kept = 0.0;
    for (std::size_t j = 0; j < K; ++j) {
      const double x = tr.states.back()[j] - e * a[j];
      d += x * x;
      kept += a[j] * a[j];
    }
    return std::sqrt(d + e * e * std::max(1.0 / 30.0 - kept, 0.0));
  }
};

TEST_CASE("manufactured solution: at least second order in M") {
  std::vector<double> h, err;
  for (std::size_t M : {4, 8, 16, 32}) {
    const ManufacturedPoly ms(M - 1);
    const auto tr = solve_modified_burgers(ms.v0(), ms.z(), ms.g(), {0.1, 2e-6, M});
    h.push_back(1.0 / M);
    err.push_back(ms.error(tr));
  }
  const double p = order(h, err);
  MESSAGE("M order " << p << " errors " << err[0] << " " << err[1] << " " << err[2] << " " << err[3]);
  CHECK(p >= 2.0);
}

namespace {

// smooth random (z, g, v0) with a few active modes
struct RandomInstance {
  std::vector<double> v0, za, zw, zp, ga, gw, gp;

  RandomInstance(std::uint64_t seed, double z_scale, double g_scale) {
    RandomStream rng(seed, 0);
    for (int k = 0; k < 4; ++k) {
      v0.push_back(rng.normal() / (k + 1));
      za.push_back(z_scale * rng.normal() / (k + 1));
      zw.push_back(6.0 * rng.uniform());
      zp.push_back(2 * pi * rng.uniform());
      ga.push_back(g_scale * rng.normal());
      gw.push_back(6.0 * rng.uniform());
      gp.push_back(2 * pi * rng.uniform());
    }
  }
  static SpectralField field(const std::vector<double>& a, const std::vector<double>& w, const std::vector<double>& p,
                             double factor = 1.0) {
    return [a, w, p, factor](double t, std::span<double> out) {
      std::fill(out.begin(), out.end(), 0.0);
      for (std::size_t k = 0; k < a.size() && k < out.size(); ++k) out[k] = factor * a[k] * std::cos(w[k] * t + p[k]);
    };
  }
  SpectralField z() const { return field(za, zw, zp); }
  SpectralField g(double factor = 1.0) const { return field(ga, gw, gp, factor); }
};

}  // namespace

TEST_CASE("zero data gives the zero solution") {
  const auto tr = solve_modified_burgers(std::vector<double>{}, zero_field(), zero_field(), {0.1, 1e-3, 16});
  for (const auto& v : tr.states)
    for (double x : v) CHECK(x == 0.0);
}

TEST_CASE("pure Burgers: energy is nonincreasing and the a priori bounds reduce to decay") {
  // |v0| = 2: the displayed N omits the |Av|_V' = |v_x| contribution, so the
  // time-derivative inequality fails without a shift; the other three hold
  const auto tr = solve_modified_burgers(std::vector<double>{2.0 / s2}, zero_field(), zero_field(), {1.0, 1e-3, 64});
  for (std::size_t n = 1; n < tr.energy.size(); ++n) CHECK(tr.energy[n] <= tr.energy[n - 1] * (1 + 1e-14));
  const auto r = check_apriori(tr);
  CHECK(r.constants.K == 1.0);
  CHECK(r.constants.L == doctest::Approx(2.0 / s2));
  CHECK(r.checks[0].holds);
  CHECK(r.checks[1].holds);
  CHECK(!r.checks[2].holds);
  CHECK(r.checks[3].holds);
  CHECK(r.checks[0].lhs == doctest::Approx(2.0));
  // the solution stays on (0,1) with zero boundary values
  const auto f = tr.at(500).physical(64);
  CHECK(f.front() == 0.0);
  CHECK(f.back() == 0.0);
}

TEST_CASE("energy identity d/dt |v|^2 / 2 = -|v_x|^2 + (g, v)") {
  const RandomInstance inst(3, 0.0, 2.0);
  const double dt = 1e-4;
  const auto tr = solve_modified_burgers(inst.v0, zero_field(), inst.g(), {0.2, dt, 32});
  const auto g = inst.g();
  std::vector<double> gv(31);
  double worst = 0.0, scale = 0.0;
  for (std::size_t n = 0; n + 1 < tr.states.size(); n += 50) {
    g(tr.time(n), gv);
    double gdotv = 0.0;
    for (std::size_t j = 0; j < 31; ++j) gdotv += gv[j] * tr.states[n][j];
    const double lhs = 0.5 * (tr.energy[n + 1] - tr.energy[n]) / dt;
    const double rhs = -tr.dirichlet[n] + gdotv;
    worst = std::max(worst, std::fabs(lhs - rhs));
    scale = std::max(scale, tr.dirichlet[n]);
  }
  CHECK(worst <= 0.05 * scale);
}

TEST_CASE("a priori inequalities hold on 50 random instances") {
  int holds = 0;
  double tightest = 0.0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const RandomInstance inst(100 + s, 1.0, 2.0);
    const auto tr = solve_modified_burgers(inst.v0, inst.z(), inst.g(), {1.0, 1e-3, 32});
    const auto r = check_apriori(tr);
    holds += r.all_hold;
    for (const auto& b : r.checks) tightest = std::max(tightest, b.lhs / b.rhs);
  }
  MESSAGE("largest lhs/rhs ratio " << tightest);
  CHECK(holds == 50);
}

TEST_CASE("doubling the forcing rescales L as displayed") {
  const RandomInstance inst(9, 0.5, 1.0);
  const auto a = check_apriori(solve_modified_burgers(inst.v0, inst.z(), inst.g(), {0.5, 1e-3, 32}));
  const auto b = check_apriori(solve_modified_burgers(inst.v0, inst.z(), inst.g(2.0), {0.5, 1e-3, 32}));
  double v0sq = 0.0;
  for (double x : inst.v0) v0sq += x * x;
  const double gint = (a.constants.L * a.constants.L - v0sq) / 2;
  CHECK(b.constants.L * b.constants.L == doctest::Approx(v0sq + 8 * gint).epsilon(1e-10));
  CHECK(b.all_hold);
}

TEST_CASE("too large a step is reported") {
  std::vector<double> v0(63, 0.0);
  v0[0] = 60.0;
  v0[1] = 40.0;
  CHECK_THROWS_AS(solve_modified_burgers(v0, zero_field(), zero_field(), {1.0, 0.05, 64}), StepSizeError);
  CHECK_THROWS_AS(solve_modified_burgers(v0, zero_field(), zero_field(), {1.0, 0.3, 64}), ConfigError);
}

namespace {

cylnoise::LevyNoiseSpec burgers_noise(std::size_t modes, double theta, subordinator::SubordinatorSpec sub) {
  return {cylnoise::CylindricalWienerSpec::hilbert_scale(ModeSet::line(modes, 1.0), theta), sub};
}

}  // namespace

TEST_CASE("stochastic Burgers without noise is deterministic Burgers") {
  const std::vector<double> u0{1.0, -0.5};
  const auto noise = burgers_noise(16, 0.25, subordinator::SubordinatorSpec::drift_only(0.0));
  const Discretization d{0.2, 1e-3, 32};
  const auto r = solve_stochastic_burgers(u0, noise, zero_field(), d, 5);
  const auto det = solve_modified_burgers(u0, zero_field(), zero_field(), d);
  for (std::size_t n = 0; n < det.states.size(); ++n)
    for (std::size_t j = 0; j < det.states[n].size(); ++j) CHECK(r.u[n][j] == doctest::Approx(det.states[n][j]));
}

TEST_CASE("stochastic Burgers: weak form, determinism and refinement") {
  const std::vector<double> u0{1.0 / s2};
  const auto noise = burgers_noise(32, 0.25, subordinator::SubordinatorSpec::stable(0.75));
  const auto f = RandomInstance(4, 0.0, 1.0).g();
  const Discretization d{0.2, 5e-4, 64};
  const auto r = solve_stochastic_burgers(u0, noise, f, d, 21);
  CHECK(std::isfinite(r.sup_energy));
  CHECK(std::isfinite(r.l4_integral));
  const auto w = weak_form_residual(r, u0, f, {1, 2, 3, 4, 5});
  MESSAGE("weak residual " << w.worst);
  CHECK(w.worst < 1e-2);
  const auto again = solve_stochastic_burgers(u0, noise, f, d, 21);
  CHECK(again.u.back() == r.u.back());
  const auto c = cauchy_refinement(u0, noise, f, d, 21, 0.05);
  MESSAGE("refinement gap " << c.gap);
  CHECK(c.pass);
}

TEST_CASE("stochastic Burgers preconditions") {
  const auto l2 = burgers_noise(8, 0.0, subordinator::SubordinatorSpec::stable(0.75));
  CHECK_THROWS_AS(solve_stochastic_burgers(std::vector<double>{}, l2, zero_field(), {0.1, 1e-2, 16}, 1), ConfigError);
  StochasticOptions o;
  o.allow_l2_noise = true;
  CHECK_NOTHROW(solve_stochastic_burgers(std::vector<double>{}, l2, zero_field(), {0.1, 1e-2, 16}, 1, o));
  const auto wide = burgers_noise(40, 0.25, subordinator::SubordinatorSpec::stable(0.75));
  CHECK_THROWS_AS(solve_stochastic_burgers(std::vector<double>{}, wide, zero_field(), {0.1, 1e-2, 16}, 1), ConfigError);
}

TEST_CASE("a shift outside L^4(0,T;L^4) is rejected") {
  // |z(t)|_L4^4 ~ t^{-3}: left sums grow 4x per halving
  const std::size_t cells = 256;
  spectral_ou::Trajectory y;
  y.grid = TimeGrid::uniform(0.1, cells);
  y.states.assign(cells + 1, std::vector<double>(1, 0.0));
  y.cell_integrals.assign(cells, std::vector<double>(1, 0.0));
  for (std::size_t n = 1; n <= cells; ++n) y.states[n][0] = std::pow(y.grid[n], -0.75);
  CHECK_THROWS_AS(solve_with_shift(std::vector<double>{}, y, 1, zero_field(), {0.1, 0.1 / cells, 16}), NumericError);
}
