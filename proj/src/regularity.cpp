#include "levyou/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "levyou/errors.hpp"
#include "levyou/jumpdecomp.hpp"
#include "levyou/parallel.hpp"
#include "levyou/rng.hpp"
#include "levyou/sine_transform.hpp"
#include "levyou/stats.hpp"

namespace levyou::regularity {

using cylnoise::LevyNoiseSpec;
using spectral_ou::SpectralOperator;
using spectral_ou::Trajectory;
using subordinator::SubordinatorPath;

namespace {

bool power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

// ---------------------------------------------------------------- Holder exponent

HolderEstimate estimate_holder_grid(std::span<const double> values, double length, std::size_t min_step,
                                    std::size_t max_step) {
  if (values.size() < 9) throw ConfigError("estimate_holder: grid too small");
  const std::size_t M = values.size() - 1;
  if (max_step == 0) max_step = M / 8;
  if (min_step == 0) min_step = 1;
  HolderEstimate est;
  std::vector<double> lx, ly;
  for (std::size_t s = min_step; s <= max_step; s *= 2) {
    double inc = 0.0;
    for (std::size_t m = 0; m + s <= M; ++m) inc = std::max(inc, std::fabs(values[m + s] - values[m]));
    if (!(inc > 0.0)) throw NumericError("estimate_holder: vanishing increments (constant field)");
    const double h = static_cast<double>(s) * length / static_cast<double>(M);
    est.scales.push_back(h);
    est.increments.push_back(inc);
    lx.push_back(std::log(h));
    ly.push_back(std::log(inc));
  }
  if (lx.size() < 4) throw ConfigError("estimate_holder: fewer than 4 usable scales");
  const auto fit = fit_line(lx, ly);
  est.delta = fit.slope;
  est.stderr_ = fit.slope_stderr;
  est.ci_lo = est.delta - 1.96 * est.stderr_;
  est.ci_hi = est.delta + 1.96 * est.stderr_;
  return est;
}

HolderEstimate estimate_holder(const spectral_ou::FieldSample& sample, std::size_t M) {
  if (!sample.modes || sample.modes->dim() != 1) throw ConfigError("estimate_holder: needs a field on (0,L), d = 1");
  if (!power_of_two(M)) throw ConfigError("estimate_holder: M must be a power of 2");
  const std::size_t N = sample.coefficients.size();
  // one wavelength of mode N spans 2M/N grid steps
  std::size_t min_step = 1;
  while (min_step * N < 2 * M) min_step *= 2;
  const auto f = sample.physical(M);
  return estimate_holder_grid(f, sample.modes->length(), min_step);
}

// ---------------------------------------------------------------- jump parts of X

Trajectory part_trajectory(const SpectralOperator& op, const LevyNoiseSpec& noise, const SubordinatorPath& zpath,
                           const TimeGrid& grid, std::uint64_t seed, const SpaceSpec& U, JumpPart part,
                           double threshold) {
  if (noise.wiener.truncation() != op.size())
    throw ConfigError("part_trajectory: noise truncation must equal the number of operator modes");
  if (U.size() < op.size()) throw ConfigError("part_trajectory: U must cover every mode");
  const auto y = jumpdecomp::sample_noise_path(noise, zpath, grid, seed);
  std::vector<const jumpdecomp::MarkedJump*> used;
  for (const auto& j : y.jumps) {
    const bool large = U.norm(j.mark) >= threshold;
    if (part == JumpPart::All || (part == JumpPart::Large) == large) used.push_back(&j);
  }
  const bool continuous = part != JumpPart::Large && zpath.slope() > 0.0;
  const std::size_t n = op.size(), cells = grid.cells();
  Trajectory tr;
  tr.grid = grid;
  tr.modes = op.modes();
  tr.states.assign(cells + 1, std::vector<double>(n, 0.0));
  tr.cell_integrals.assign(cells, std::vector<double>(n, 0.0));
  // jump index range per cell: times in (t_c, t_{c+1}]
  std::vector<std::size_t> first(cells + 1, used.size());
  {
    std::size_t k = 0;
    for (std::size_t c = 0; c < cells; ++c) {
      while (k < used.size() && used[k]->time <= grid[c]) ++k;
      first[c] = k;
    }
  }
  const auto& w = noise.wiener.weights();
  parallel_for(n, [&](std::size_t j) {
    const double l = op.eigenvalue(j);
    double x = 0.0;
    for (std::size_t c = 0; c < cells; ++c) {
      const double t1 = grid[c + 1], h = t1 - grid[c];
      const double em = -std::expm1(-l * h);
      double a = 0.0, b = 0.0;
      if (continuous) {
        const auto dm = spectral_ou::drift_cell_moments(l, h, zpath.slope());
        const std::uint64_t stream = stream_id({tag("part-continuous"), c});
        const double n1 = counter_normal(seed, stream, 2 * j), n2 = counter_normal(seed, stream, 2 * j + 1);
        const double sa = std::sqrt(dm.var_a);
        a = sa * n1 / w[j];
        b = (dm.cov / sa * n1 + std::sqrt(std::max(dm.var_b - dm.cov * dm.cov / dm.var_a, 0.0)) * n2) / w[j];
      }
      for (std::size_t k = first[c]; k < used.size() && used[k]->time <= t1; ++k) {
        const double u = t1 - used[k]->time;
        a += std::exp(-l * u) * used[k]->mark[j];
        b += -std::expm1(-l * u) / l * used[k]->mark[j];
      }
      tr.cell_integrals[c][j] = x * em / l + b;
      x = x * std::exp(-l * h) + a;
      tr.states[c + 1][j] = x;
    }
  });
  return tr;
}

// ---------------------------------------------------------------- time integrability

double time_integral(const Trajectory& x, const FieldNorm& norm, double p, std::size_t stride) {
  const std::size_t cells = x.grid.cells();
  if (stride == 0 || cells % stride != 0) throw ConfigError("time_integral: stride must divide the cell count");
  double s = 0.0;
  for (std::size_t k = 0; k < cells; k += stride) s += (x.grid[k + stride] - x.grid[k]) * std::pow(norm(x.states[k]), p);
  return s;
}

IntegrabilityReport time_integrability(const std::vector<Trajectory>& paths, const FieldNorm& norm, double p,
                                       std::size_t levels, double tolerance) {
  if (paths.empty() || levels < 2) throw ConfigError("time_integrability: need paths and at least 2 levels");
  IntegrabilityReport r;
  r.tolerance = tolerance;
  const std::size_t cells = paths.front().grid.cells();
  for (const auto& x : paths)
    if (x.grid.cells() != cells) throw ConfigError("time_integrability: paths must share the grid size");
  const std::size_t coarsest = std::size_t{1} << (levels - 1);
  if (cells % coarsest != 0) throw ConfigError("time_integrability: grid cannot be halved that often");
  r.integrals.assign(levels, std::vector<double>(paths.size()));
  parallel_for(paths.size(), [&](std::size_t i) {
    for (std::size_t l = 0; l < levels; ++l)
      r.integrals[l][i] = time_integral(paths[i], norm, p, coarsest >> l);
  });
  for (std::size_t l = 0; l < levels; ++l) {
    r.cells.push_back(cells / (coarsest >> l));
    double m = 0.0;
    for (double v : r.integrals[l]) m += v;
    r.mean.push_back(m / static_cast<double>(paths.size()));
  }
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const double fine = r.integrals[levels - 1][i], half = r.integrals[levels - 2][i];
    const double c = fine == 0.0 ? (half == 0.0 ? 0.0 : 1.0) : std::fabs(fine - half) / std::fabs(fine);
    r.last_change.push_back(c);
    r.max_change = std::max(r.max_change, c);
  }
  r.stabilized = r.max_change < tolerance;
  return r;
}

ScalingReport x1_time_scaling(const SpectralOperator& op, const LevyNoiseSpec& noise, const SpaceSpec& U,
                              const SpaceSpec& E, double p, double theta, const ScalingOptions& opts,
                              std::uint64_t seed) {
  if (opts.horizons.size() < 2) throw ConfigError("x1_time_scaling: need at least 2 horizons");
  ScalingReport r;
  r.horizons = opts.horizons;
  r.expected = 2.0 - theta * p;
  r.tolerance = opts.tolerance;
  subordinator::PathOptions po;
  po.method = subordinator::SamplingMethod::CutoffJumps;
  po.cutoff = opts.cutoff;
  const FieldNorm norm = [&E](std::span<const double> x) { return E.norm(x); };
  std::vector<double> lx, ly;
  for (std::size_t h = 0; h < opts.horizons.size(); ++h) {
    const double T = opts.horizons[h];
    const auto grid = TimeGrid::uniform(T, opts.cells);
    const auto st = mc_mean(opts.paths, seed, stream_id({tag("x1-scaling"), h}), [&](RandomStream& rng) {
      const std::uint64_t s = rng.next_u64();
      const auto z = subordinator::simulate_path(noise.subordinator, T, po, s);
      const auto x = part_trajectory(op, noise, z, grid, s, U, JumpPart::Small, opts.threshold);
      return time_integral(x, norm, p);
    });
    r.means.push_back(st.mean);
    r.stderrs.push_back(st.stderr_);
    lx.push_back(std::log(T));
    ly.push_back(std::log(st.mean));
  }
  r.exponent = fit_line(lx, ly).slope;
  r.ratios_ok = true;
  for (std::size_t h = 0; h + 1 < r.horizons.size(); ++h) {
    if (std::fabs(r.horizons[h + 1] - 2.0 * r.horizons[h]) > 1e-12 * r.horizons[h + 1]) continue;
    const double ratio = r.means[h + 1] / r.means[h];
    r.doubling_ratio.push_back(ratio);
    r.ratios_ok = r.ratios_ok && ratio <= std::pow(2.0, r.expected) * (1.0 + opts.band);
  }
  r.pass = std::fabs(r.exponent - r.expected) <= r.tolerance;
  return r;
}

// ---------------------------------------------------------------- blow-up probe

BlowupReport blowup_probe(const SpectralOperator& op, const LevyNoiseSpec& noise, const SpaceSpec& F,
                          const SpaceSpec& U, const std::vector<std::size_t>& truncations, std::uint64_t seed,
                          const BlowupOptions& opts) {
  const std::size_t nmax = op.size();
  if (noise.wiener.truncation() != nmax) throw ConfigError("blowup_probe: noise truncation must equal the operator's");
  if (F.size() < nmax || U.size() < nmax) throw ConfigError("blowup_probe: F and U must cover every mode");
  if (truncations.size() < 2) throw ConfigError("blowup_probe: need at least 2 truncations");
  for (std::size_t i = 0; i < truncations.size(); ++i)
    if (truncations[i] == 0 || truncations[i] > nmax || (i && truncations[i] <= truncations[i - 1]))
      throw ConfigError("blowup_probe: truncations must increase and not exceed the operator size");
  BlowupReport r;
  r.truncations = truncations;
  const auto& w = noise.wiener.weights();
  {
    double s = 0.0;
    std::size_t next = 0;
    for (std::size_t j = 0; j < nmax && next < truncations.size(); ++j) {
      const double q = F.weights()[j] / w[j];
      s += q * q;
      if (j + 1 == truncations[next]) {
        r.weight_ratio_sum.push_back(s);
        ++next;
      }
    }
  }
  subordinator::PathOptions po;
  po.method = subordinator::SamplingMethod::CutoffJumps;
  po.cutoff = opts.cutoff;
  const auto z = subordinator::simulate_path(noise.subordinator, opts.horizon, po, seed);
  const auto y = jumpdecomp::sample_noise_path(noise, z, TimeGrid::uniform(opts.horizon, 1), seed);
  const auto large = jumpdecomp::split(y, U, opts.threshold).large.jumps;
  if (large.empty()) return r;
  r.conclusive = true;
  r.tau1 = large.front().time;
  r.jump_size = large.front().size;
  const double h = std::max(std::min(opts.window * opts.horizon, opts.horizon - r.tau1), 1e-12);
  std::vector<double> times{r.tau1};
  for (std::size_t i = 0; i < opts.time_points; ++i) times.push_back(r.tau1 + h * std::ldexp(1.0, -static_cast<int>(i)));

  r.sup_f.assign(truncations.size(), 0.0);
  r.sup_u.assign(truncations.size(), 0.0);
  std::vector<double> x(nmax);
  for (double t : times) {
    std::fill(x.begin(), x.end(), 0.0);
    for (const auto& jmp : large) {
      if (jmp.time > t) break;
      for (std::size_t j = 0; j < nmax; ++j) x[j] += std::exp(-op.eigenvalue(j) * (t - jmp.time)) * jmp.mark[j];
    }
    for (std::size_t i = 0; i < truncations.size(); ++i) {
      const std::span<const double> head(x.data(), truncations[i]);
      r.sup_f[i] = std::max(r.sup_f[i], F.norm(head));
      r.sup_u[i] = std::max(r.sup_u[i], U.norm(head));
    }
  }
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < truncations.size(); ++i) {
    lx.push_back(std::log(static_cast<double>(truncations[i])));
    ly.push_back(std::log(r.sup_f[i]));
  }
  r.slope = fit_line(lx, ly).slope;
  const auto [mn, mx] = std::minmax_element(r.sup_u.begin(), r.sup_u.end());
  r.u_spread = *mx / *mn;
  r.growth = r.slope >= opts.growth_slope;
  r.u_bounded = r.u_spread <= opts.u_ratio;
  r.success = r.growth && r.u_bounded;
  return r;
}

// ---------------------------------------------------------------- circle experiment

std::vector<double> circle_convolution(const CirclePath& path) {
  const std::size_t M = path.increments.size();
  if (M < 2 || path.profile.size() != M + 1) throw ConfigError("circle_convolution: profile needs M + 1 nodes");
  double scale = 0.0;
  for (double v : path.profile) scale = std::max(scale, std::fabs(v));
  if (std::fabs(path.profile.front() - path.profile.back()) > 1e-12 * std::max(scale, 1.0))
    throw ConfigError("circle_convolution: profile is not periodic");
  return circular_convolution(std::span<const double>(path.profile.data(), M), path.increments);
}

std::vector<double> rough_profile(double theta, std::size_t M, std::uint64_t seed) {
  if (M < 4 || M % 2) throw ConfigError("rough_profile: M must be even and >= 4");
  const std::size_t K = M / 2;
  RandomStream rng(seed, stream_id({tag("profile-phase")}));
  std::vector<double> amp(K), phase(K);
  for (std::size_t k = 1; k <= K; ++k) {
    amp[k - 1] = std::pow(static_cast<double>(k), -(theta + 0.5));
    phase[k - 1] = 2.0 * std::numbers::pi * rng.uniform();
  }
  auto f = periodic_synthesis(amp, phase, M);
  f.push_back(f.front());
  return f;
}

std::vector<double> scalar_increments(const subordinator::SubordinatorSpec& sub, std::size_t M, std::uint64_t seed) {
  const double T = 2.0 * std::numbers::pi;
  subordinator::PathOptions po;
  po.grid_cells = M;
  const auto z = subordinator::simulate_path(sub, T, po, seed);
  RandomStream rng(seed, stream_id({tag("circle-gauss")}));
  std::vector<double> dy(M);
  for (std::size_t k = 0; k < M; ++k) {
    const double dz = z.increment(T * static_cast<double>(k) / static_cast<double>(M),
                                  T * static_cast<double>(k + 1) / static_cast<double>(M));
    dy[k] = std::sqrt(std::max(dz, 0.0)) * rng.normal();
  }
  return dy;
}

CircleSweep circle_sweep(const subordinator::SubordinatorSpec& sub, const std::vector<double>& thetas,
                         const std::vector<std::size_t>& grids, std::uint64_t seed, double growth_slope) {
  if (grids.size() < 2) throw ConfigError("circle_sweep: need at least 2 grids");
  const std::size_t finest = *std::max_element(grids.begin(), grids.end());
  for (auto m : grids)
    if (m < 4 || finest % m) throw ConfigError("circle_sweep: grids must divide the finest grid");
  const auto fine = scalar_increments(sub, finest, seed);
  CircleSweep out;
  out.grids = grids;
  for (double theta : thetas) {
    CircleSweepRow row;
    row.theta = theta;
    std::vector<double> lx, ly;
    for (auto m : grids) {
      const std::size_t f = finest / m;
      std::vector<double> dy(m, 0.0);
      for (std::size_t k = 0; k < finest; ++k) dy[k / f] += fine[k];
      const auto x = circle_convolution({rough_profile(theta, m, seed), dy});
      double sup = 0.0;
      for (double v : x) sup = std::max(sup, std::fabs(v));
      row.sups.push_back(sup);
      lx.push_back(std::log(static_cast<double>(m)));
      ly.push_back(std::log(sup));
    }
    row.slope = fit_line(lx, ly).slope;
    row.growth = row.slope >= growth_slope;
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace levyou::regularity
