#include "levyou/burgers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "levyou/errors.hpp"
#include "levyou/sine_transform.hpp"

namespace levyou::burgers {

namespace {

constexpr double pi = std::numbers::pi;

// Pseudo-spectral products for K = M - 1 modes. Quadratic terms are formed on
// n > 3K/2 cells so cosine coefficients up to K are alias-free; quartic
// integrals use 2M cells.
class Products {
 public:
  explicit Products(std::size_t M) : K_(M - 1), n_(3 * M / 2 + 1), n4_(2 * M) {}

  std::size_t modes() const noexcept { return K_; }

  std::vector<double> nodes(std::span<const double> c) const { return sine_synthesis(c, n_, 1.0); }

  // c_j = int_0^1 w sqrt(2) cos(j pi x) dx, j = 1..K, from nodal values on the padded grid
  std::vector<double> cosine_coefficients(std::span<const double> w) const {
    const auto y = dct1(w);
    std::vector<double> c(K_);
    const double s = std::numbers::sqrt2 / (2.0 * static_cast<double>(n_));
    for (std::size_t j = 0; j < K_; ++j) c[j] = s * y[j + 1];
    return c;
  }

  // -(B(v,z) + B(z,v) + B(v,v)) in mode j is j pi c_j(vz + v^2/2)
  void add_transport(std::span<const double> v, std::span<const double> z, std::span<double> out) const {
    const auto vn = nodes(v);
    std::vector<double> w(vn.size());
    if (z.empty()) {
      for (std::size_t m = 0; m < w.size(); ++m) w[m] = 0.5 * vn[m] * vn[m];
    } else {
      const auto zn = nodes(z);
      for (std::size_t m = 0; m < w.size(); ++m) w[m] = vn[m] * zn[m] + 0.5 * vn[m] * vn[m];
    }
    const auto c = cosine_coefficients(w);
    for (std::size_t j = 0; j < K_; ++j) out[j] += static_cast<double>(j + 1) * pi * c[j];
  }

  double l4_pow4(std::span<const double> c) const {
    const auto f = sine_synthesis(c, n4_, 1.0);
    double s = 0.0;
    for (double x : f) s += x * x * x * x;
    return s / static_cast<double>(n4_);
  }

 private:
  std::size_t K_, n_, n4_;
};

double lambda(std::size_t j) {
  const double k = static_cast<double>(j + 1) * pi;
  return k * k;
}

double dual_sq(std::span<const double> c) {
  double s = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) s += c[j] * c[j] / lambda(j);
  return s;
}

double sq(std::span<const double> c) {
  double s = 0.0;
  for (double x : c) s += x * x;
  return s;
}

std::size_t step_count(const Discretization& d) {
  if (!(d.horizon > 0.0) || !(d.dt > 0.0)) throw ConfigError("burgers: horizon and dt must be positive");
  if (d.M < 4) throw ConfigError("burgers: M must be >= 4");
  const double r = d.horizon / d.dt;
  const auto n = static_cast<std::size_t>(std::llround(r));
  if (n == 0 || std::fabs(r - static_cast<double>(n)) > 1e-9 * r)
    throw ConfigError("burgers: dt must divide the horizon");
  return n;
}

using NodeField = std::function<void(std::size_t n, std::span<double> out)>;
using Forcing = std::function<void(std::size_t n, std::span<const double> z, std::span<double> out)>;

BurgersTrajectory solve_core(std::span<const double> v0, const NodeField& zf, const Forcing& gf,
                             const Discretization& disc) {
  const std::size_t steps = step_count(disc);
  const Products prod(disc.M);
  const std::size_t K = prod.modes();
  if (v0.size() > K) throw ConfigError("solve_modified_burgers: initial datum has more modes than the grid resolves");
  BurgersTrajectory tr;
  tr.disc = disc;
  tr.states.reserve(steps + 1);
  std::vector<double> v(K, 0.0), z(K), g(K), rhs(K), decay(K), phi(K);
  std::copy(v0.begin(), v0.end(), v.begin());
  for (std::size_t j = 0; j < K; ++j) {
    const double l = lambda(j);
    decay[j] = std::exp(-l * disc.dt);
    phi[j] = -std::expm1(-l * disc.dt) / l;
  }
  const double v0_sq = sq(v);
  double z_int = 0.0, g_int = 0.0;
  for (std::size_t n = 0;; ++n) {
    std::fill(z.begin(), z.end(), 0.0);
    zf(n, z);
    std::fill(g.begin(), g.end(), 0.0);
    gf(n, z, g);
    std::copy(g.begin(), g.end(), rhs.begin());
    prod.add_transport(v, z, rhs);

    const double e = sq(v);
    if (!std::isfinite(e)) throw StepSizeError("burgers: non-finite state at t = " + std::to_string(tr.time(n)));
    const auto c = apriori_constants(v0_sq, z_int, g_int, disc.dt * static_cast<double>(n));
    const double bound = c.K * c.K * c.L * c.L;
    if (e > 10.0 * bound + 1e-300)
      throw StepSizeError("burgers: |v|^2 = " + std::to_string(e) + " exceeds 10x the a priori bound " +
                          std::to_string(bound) + " at t = " + std::to_string(tr.time(n)) + "; reduce dt");
    double d = 0.0, rate = 0.0;
    for (std::size_t j = 0; j < K; ++j) {
      d += lambda(j) * v[j] * v[j];
      const double vp = rhs[j] - lambda(j) * v[j];
      rate += vp * vp / lambda(j);
    }
    tr.states.push_back(v);
    tr.energy.push_back(e);
    tr.dirichlet.push_back(d);
    tr.l4.push_back(prod.l4_pow4(v));
    tr.rate_dual.push_back(rate);
    tr.z_l4.push_back(prod.l4_pow4(z));
    tr.g_dual.push_back(dual_sq(g));
    if (n == steps) break;
    z_int += disc.dt * tr.z_l4.back();
    g_int += disc.dt * tr.g_dual.back();
    for (std::size_t j = 0; j < K; ++j) v[j] = decay[j] * v[j] + phi[j] * rhs[j];
  }
  return tr;
}

}  // namespace

SpectralField zero_field() {
  return [](double, std::span<double> out) { std::fill(out.begin(), out.end(), 0.0); };
}

std::vector<double> BurgersState::physical(std::size_t M) const { return sine_synthesis(coefficients, M, 1.0); }

BurgersTrajectory solve_modified_burgers(std::span<const double> v0, const SpectralField& z, const SpectralField& g,
                                         const Discretization& disc) {
  const double dt = disc.dt;
  return solve_core(
      v0, [&](std::size_t n, std::span<double> out) { z(dt * static_cast<double>(n), out); },
      [&](std::size_t n, std::span<const double>, std::span<double> out) { g(dt * static_cast<double>(n), out); },
      disc);
}

AprioriConstants apriori_constants(double v0_sq, double z_l4_integral, double g_dual_integral, double horizon) {
  AprioriConstants c;
  c.K = std::exp(z_l4_integral);
  c.L = std::sqrt(v0_sq + 2.0 * g_dual_integral);
  c.M = std::sqrt(v0_sq + 9.0 * c.K * c.L * z_l4_integral + g_dual_integral);
  c.N = std::sqrt(g_dual_integral) + 2.0 * c.K * c.L * c.M * std::sqrt(z_l4_integral) +
        std::pow(horizon, 0.25) / std::numbers::sqrt2 * std::pow(c.K, 1.5) * std::sqrt(c.L);
  return c;
}

AprioriReport check_apriori(const BurgersTrajectory& tr, double slack) {
  const double dt = tr.disc.dt, T = tr.disc.horizon;
  const std::size_t S = tr.steps();
  double zi = 0.0, gi = 0.0, di = 0.0, ri = 0.0, li = 0.0;
  for (std::size_t n = 0; n < S; ++n) {
    zi += dt * tr.z_l4[n];
    gi += dt * tr.g_dual[n];
    di += dt * tr.dirichlet[n];
    ri += dt * tr.rate_dual[n];
    li += dt * tr.l4[n];
  }
  AprioriReport r;
  r.slack = slack;
  r.constants = apriori_constants(tr.energy.front(), zi, gi, T);
  const auto& c = r.constants;
  const double sup = *std::max_element(tr.energy.begin(), tr.energy.end());
  r.checks = {{"sup |v|^2 <= K^2 L^2", sup, c.K * c.K * c.L * c.L},
              {"int |grad v|^2 <= M^2", di, c.M * c.M},
              {"int |v'|_V'^2 <= N^2", ri, c.N * c.N},
              {"int |v|_L4^4 <= 2 T^1/2 K^3 L^3 M", li, 2.0 * std::sqrt(T) * std::pow(c.K * c.L, 3.0) * c.M}};
  r.all_hold = true;
  for (auto& b : r.checks) {
    b.holds = b.lhs <= b.rhs * (1.0 + slack);
    r.all_hold = r.all_hold && b.holds;
  }
  return r;
}

// ---------------------------------------------------------------- stochastic equation

StochasticBurgersResult solve_with_shift(std::span<const double> u0, const spectral_ou::Trajectory& shift,
                                         std::size_t stride, const SpectralField& f, const Discretization& disc,
                                         const StochasticOptions& opts) {
  const std::size_t steps = step_count(disc);
  if (stride == 0 || shift.grid.cells() != steps * stride || !shift.grid.is_uniform() ||
      std::fabs(shift.grid.horizon() - disc.horizon) > 1e-9 * disc.horizon)
    throw ConfigError("solve_with_shift: shift grid must be uniform with stride * steps cells over the horizon");
  const std::size_t kn = shift.states.front().size();
  if (kn > disc.M - 1) throw ConfigError("solve_with_shift: noise has more modes than the grid resolves");
  const Products prod(disc.M);
  const double dt = disc.dt;

  StochasticBurgersResult r;
  r.shift = shift;
  r.stride = stride;
  {
    // int |Y_A|_L4^4 with left-point sums on the shift grid and its 2x, 4x coarsenings
    const std::size_t cells = shift.grid.cells();
    const double h = shift.grid.horizon() / static_cast<double>(cells);
    r.shift_l4_levels.assign(3, 0.0);
    for (std::size_t n = 0; n < cells; ++n) {
      const double q = prod.l4_pow4(shift.states[n]);
      for (std::size_t l = 0; l < 3; ++l) {
        const std::size_t w = std::size_t{1} << l;
        if (n % w == 0) r.shift_l4_levels[l] += static_cast<double>(std::min(w, cells - n)) * h * q;
      }
    }
    r.shift_l4_integral = r.shift_l4_levels[0];
    const double g = 1.0 + opts.shift_l4_tolerance;
    const auto& I = r.shift_l4_levels;
    if (cells >= 4 && I[0] > g * I[1] && I[1] > g * I[2])
      throw NumericError("stochastic burgers: int |Y_A|_L4^4 grows under time refinement (" + std::to_string(I[2]) +
                         " -> " + std::to_string(I[1]) + " -> " + std::to_string(I[0]) +
                         "); the shift is not in L^4(0,T;L^4)");
  }

  const auto zf = [&](std::size_t n, std::span<double> out) {
    const auto& s = shift.states[n * stride];
    std::copy(s.begin(), s.end(), out.begin());
  };
  // g = f - B(z, z); -B(z,z) in mode j is j pi c_j(z^2 / 2)
  const auto gf = [&](std::size_t n, std::span<const double> z, std::span<double> out) {
    f(dt * static_cast<double>(n), out);
    const auto zn = prod.nodes(z);
    std::vector<double> w(zn.size());
    for (std::size_t m = 0; m < w.size(); ++m) w[m] = 0.5 * zn[m] * zn[m];
    const auto c = prod.cosine_coefficients(w);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += static_cast<double>(j + 1) * pi * c[j];
  };
  r.v = solve_core(u0, zf, gf, disc);

  r.u.resize(steps + 1);
  for (std::size_t n = 0; n <= steps; ++n) {
    r.u[n] = r.v.states[n];
    const auto& s = shift.states[n * stride];
    for (std::size_t j = 0; j < kn; ++j) r.u[n][j] += s[j];
    r.sup_energy = std::max(r.sup_energy, sq(r.u[n]));
    if (n < steps) r.l4_integral += dt * prod.l4_pow4(r.u[n]);
  }
  return r;
}

StochasticBurgersResult solve_stochastic_burgers(std::span<const double> u0, const cylnoise::LevyNoiseSpec& noise,
                                                 const SpectralField& f, const Discretization& disc, std::uint64_t seed,
                                                 const StochasticOptions& opts) {
  const std::size_t steps = step_count(disc);
  const double theta = noise.wiener.hilbert_order();
  const double lo = opts.allow_l2_noise ? 0.0 : 1e-300;
  if (!(theta >= lo && theta < 0.5))
    throw ConfigError("stochastic burgers: the noise must be H^{theta,2}-cylindrical with theta in (0,1/2)");
  const std::size_t kn = noise.wiener.truncation();
  if (kn > disc.M - 1) throw ConfigError("stochastic burgers: noise has more modes than the grid resolves");
  const auto op = spectral_ou::SpectralOperator::fractional_laplacian(ModeSet::line(kn, 1.0), 1.0);
  subordinator::PathOptions po;
  po.method = subordinator::SamplingMethod::CutoffJumps;
  po.cutoff = opts.cutoff;
  const auto z = subordinator::simulate_path(noise.subordinator, disc.horizon, po, seed);
  const auto shift = spectral_ou::sample_trajectory(op, noise, z, TimeGrid::uniform(disc.horizon, steps), seed);
  return solve_with_shift(u0, shift, 1, f, disc, opts);
}

WeakResidual weak_form_residual(const StochasticBurgersResult& r, std::span<const double> u0, const SpectralField& f,
                                const std::vector<int>& ks) {
  const auto& disc = r.v.disc;
  const std::size_t S = r.v.steps(), K = r.v.states.front().size(), kn = r.shift.states.front().size();
  const double dt = disc.dt, s2 = std::numbers::sqrt2;
  const Products prod(disc.M);
  WeakResidual out;
  out.k = ks;
  for (int k : ks)
    if (k < 1 || static_cast<std::size_t>(k) > K) throw ConfigError("weak_form_residual: test mode out of range");
  // cosine coefficients of u^2 and the forcing at each node
  std::vector<std::vector<double>> usq(S), fn(S);
  for (std::size_t n = 0; n < S; ++n) {
    auto un = prod.nodes(r.u[n]);
    for (auto& x : un) x *= x;
    usq[n] = prod.cosine_coefficients(un);
    fn[n].assign(K, 0.0);
    f(dt * static_cast<double>(n), fn[n]);
  }
  for (int k : ks) {
    const std::size_t j = static_cast<std::size_t>(k - 1);
    const double l = lambda(j), kp = k * pi;
    const double u0k = j < u0.size() ? u0[j] : 0.0;
    double lin = 0.0, nonlin = 0.0, force = 0.0, shift_int = 0.0, worst = 0.0;
    for (std::size_t n = 0; n <= S; ++n) {
      if (n > 0) {
        const std::size_t m = n - 1;
        const double a = r.u[m][j], b = r.u[n][j];
        double ya = 0.0, yb = 0.0, yi = 0.0;
        if (j < kn) {
          ya = r.shift.states[m * r.stride][j];
          yb = r.shift.states[n * r.stride][j];
          for (std::size_t c = m * r.stride; c < n * r.stride; ++c) yi += r.shift.cell_integrals[c][j];
        }
        // v is continuous in time: trapezoid; Y_A enters through its exact cell integral
        lin += 0.5 * dt * ((a - ya) + (b - yb)) + yi;
        shift_int += yi;
        nonlin += dt * kp * usq[m][j] / s2;
        force += dt * fn[m][j];
      }
      const double yt = j < kn ? r.shift.states[n * r.stride][j] : 0.0;
      const double y_pair = (yt + l * shift_int) / s2;  // <psi, Y(t)> with Y = Y_A + int A Y_A
      const double res = (r.u[n][j] - u0k) / s2 + l * lin / s2 - 0.5 * nonlin - force / s2 - y_pair;
      worst = std::max(worst, std::fabs(res));
    }
    out.max_abs.push_back(worst);
    out.worst = std::max(out.worst, worst);
  }
  return out;
}

CauchyReport cauchy_refinement(std::span<const double> u0, const cylnoise::LevyNoiseSpec& noise, const SpectralField& f,
                               const Discretization& coarse, std::uint64_t seed, double tolerance,
                               const StochasticOptions& opts) {
  Discretization fine{coarse.horizon, 0.5 * coarse.dt, 2 * coarse.M};
  const auto rf = solve_stochastic_burgers(u0, noise, f, fine, seed, opts);
  const auto rc = solve_with_shift(u0, rf.shift, 2, f, coarse, opts);
  CauchyReport c;
  c.tolerance = tolerance;
  double diff = 0.0, scale = 0.0;
  for (std::size_t n = 0; n < rc.u.size(); ++n) {
    const auto& a = rc.u[n];
    const auto& b = rf.u[2 * n];
    double d = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double x = (j < a.size() ? a[j] : 0.0) - b[j];
      d += x * x;
    }
    diff = std::max(diff, std::sqrt(d));
    scale = std::max(scale, std::sqrt(sq(b)));
  }
  c.gap = scale > 0.0 ? diff / scale : diff;
  c.pass = c.gap <= tolerance;
  return c;
}

void write_trajectory_csv(std::ostream& os, const std::vector<std::vector<double>>& states, double dt, std::size_t M,
                          std::size_t every) {
  if (every == 0) throw ConfigError("write_trajectory_csv: every must be positive");
  os << "t,x,value\n";
  for (std::size_t n = 0; n < states.size(); n += every) {
    const auto f = sine_synthesis(states[n], M, 1.0);
    for (std::size_t m = 0; m <= M; ++m)
      os << dt * static_cast<double>(n) << ',' << static_cast<double>(m) / static_cast<double>(M) << ',' << f[m] << '\n';
  }
}

}  // namespace levyou::burgers
