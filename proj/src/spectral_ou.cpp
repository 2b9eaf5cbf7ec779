#include "levyou/spectral_ou.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "levyou/errors.hpp"
#include "levyou/parallel.hpp"
#include "levyou/quadrature.hpp"
#include "levyou/rng.hpp"
#include "levyou/sine_transform.hpp"

namespace levyou::spectral_ou {

using cylnoise::LevyNoiseSpec;
using subordinator::SubordinatorPath;

// ---------------------------------------------------------------- operator

SpectralOperator::SpectralOperator(std::vector<double> lambda, double gamma, std::shared_ptr<const ModeSet> modes)
    : lambda_(std::move(lambda)), gamma_(gamma), modes_(std::move(modes)) {
  if (lambda_.empty()) throw ConfigError("SpectralOperator: no modes");
  for (std::size_t j = 0; j < lambda_.size(); ++j) {
    if (!(lambda_[j] > 0.0) || !std::isfinite(lambda_[j]))
      throw ConfigError("SpectralOperator: eigenvalues must be positive and finite");
    if (j > 0 && lambda_[j] < lambda_[j - 1]) throw ConfigError("SpectralOperator: eigenvalues must be nondecreasing");
  }
}

SpectralOperator SpectralOperator::fractional_laplacian(ModeSet modes, double gamma) {
  if (!(gamma > 0.0)) throw ConfigError("SpectralOperator: gamma must be positive");
  std::vector<double> lambda(modes.size());
  for (std::size_t j = 0; j < modes.size(); ++j) lambda[j] = std::pow(modes.laplacian_eigenvalue(j), gamma);
  return SpectralOperator(std::move(lambda), gamma, std::make_shared<const ModeSet>(std::move(modes)));
}

SpectralOperator SpectralOperator::cube(std::size_t dim, std::size_t per_axis, double gamma, double length) {
  return fractional_laplacian(ModeSet::cube(dim, per_axis, length), gamma);
}

SpectralOperator SpectralOperator::from_eigenvalues(std::vector<double> lambda) {
  return SpectralOperator(std::move(lambda), 0.0, nullptr);
}

SpectralOperator SpectralOperator::prefix(std::size_t n) const {
  if (n == 0 || n > size()) throw ConfigError("SpectralOperator::prefix: bad size");
  std::vector<double> l(lambda_.begin(), lambda_.begin() + static_cast<std::ptrdiff_t>(n));
  std::shared_ptr<const ModeSet> m;
  if (modes_) m = std::make_shared<const ModeSet>(modes_->prefix(n));
  return SpectralOperator(std::move(l), gamma_, std::move(m));
}

std::vector<double> FieldSample::physical(std::size_t M) const {
  if (!modes) throw ConfigError("FieldSample::physical: no mode geometry attached");
  if (modes->dim() == 1) return sine_synthesis(coefficients, M, modes->length());
  std::vector<std::uint32_t> idx;
  idx.reserve(coefficients.size() * modes->dim());
  for (std::size_t j = 0; j < coefficients.size(); ++j) {
    const auto n = modes->multi_index(j);
    idx.insert(idx.end(), n.begin(), n.end());
  }
  return sine_synthesis_cube(modes->dim(), idx, coefficients, M, modes->length());
}

void write_field_csv(std::ostream& os, const FieldSample& x) {
  os << "# time=" << x.time << '\n';
  const std::size_t d = x.modes ? x.modes->dim() : 1;
  for (std::size_t i = 0; i < d; ++i) os << 'n' << (i + 1) << ',';
  os << "coefficient\n";
  os.precision(17);
  for (std::size_t j = 0; j < x.coefficients.size(); ++j) {
    if (x.modes) {
      for (auto n : x.modes->multi_index(j)) os << n << ',';
    } else {
      os << (j + 1) << ',';
    }
    os << x.coefficients[j] << '\n';
  }
}

// ---------------------------------------------------------------- operator norms

std::optional<double> power_exponent(std::span<const double> weights, std::span<const double> lambda,
                                     double rel_tol) {
  const std::size_t n = std::min(weights.size(), lambda.size());
  if (n == 0) return std::nullopt;
  std::size_t pivot = 0;
  for (std::size_t j = 1; j < n; ++j)
    if (std::fabs(std::log(lambda[j])) > std::fabs(std::log(lambda[pivot]))) pivot = j;
  const double lp = std::log(lambda[pivot]);
  double e = 0.0;
  if (lp != 0.0) e = std::log(weights[pivot]) / lp;
  for (std::size_t j = 0; j < n; ++j) {
    const double lw = std::log(weights[j]);
    const double pred = e * std::log(lambda[j]);
    if (std::fabs(lw - pred) > rel_tol * std::max(1.0, std::fabs(lw))) return std::nullopt;
  }
  return e;
}

namespace {

void check_pair(const SpectralOperator& op, const SpaceSpec& U, const SpaceSpec& E) {
  if (U.size() < op.size() || E.size() < op.size())
    throw ConfigError("semigroup_norm: spaces must cover every retained mode");
}

}  // namespace

SemigroupNorm semigroup_norm(const SpectralOperator& op, const SpaceSpec& U, const SpaceSpec& E, double t) {
  if (!(t > 0.0)) throw ConfigError("semigroup_norm: t must be positive");
  check_pair(op, U, E);
  const auto& lam = op.eigenvalues();
  const double rq = U.q() / E.q();
  const auto& aw = U.weights();  // a_n^{-1}
  const auto& bw = E.weights();
  auto log_term = [&](std::size_t j) { return -lam[j] * t + std::log(bw[j]) - rq * std::log(aw[j]); };

  SemigroupNorm out;
  const std::span<const double> ls(lam.data(), op.size());
  const auto beta = power_exponent(std::span<const double>(bw.data(), op.size()), ls);
  const auto neg_alpha = power_exponent(std::span<const double>(aw.data(), op.size()), ls);
  if (beta && neg_alpha) {
    out.power_law = true;
    const double kappa = *beta - rq * *neg_alpha;
    out.exponent = kappa;
    out.envelope = kappa > 0.0 ? std::exp(-kappa) * std::pow(kappa, kappa) * std::pow(t, -kappa) : 1.0;
    std::size_t best = 0;
    if (kappa > 0.0) {
      // f(lambda) = exp(-lambda t) lambda^kappa is unimodal with mode kappa / t
      const auto it = std::lower_bound(lam.begin(), lam.end(), kappa / t);
      const std::size_t k = static_cast<std::size_t>(it - lam.begin());
      if (k == lam.size()) {
        best = static_cast<std::size_t>(std::lower_bound(lam.begin(), lam.end(), lam.back()) - lam.begin());
      } else if (k == 0) {
        best = 0;
      } else {
        const std::size_t below =
            static_cast<std::size_t>(std::lower_bound(lam.begin(), lam.end(), lam[k - 1]) - lam.begin());
        best = log_term(below) >= log_term(k) ? below : k;
      }
    }
    out.maximizer = best;
    out.value = std::exp(log_term(best));
    return out;
  }
  std::size_t best = 0;
  double bl = log_term(0);
  for (std::size_t j = 1; j < op.size(); ++j) {
    const double l = log_term(j);
    if (l > bl) {
      bl = l;
      best = j;
    }
  }
  out.maximizer = best;
  out.value = std::exp(bl);
  return out;
}

SlopeCheck check_semigroup_slope(const SpectralOperator& op, const SpaceSpec& U, const SpaceSpec& E, double t_lo,
                                 double t_hi, std::size_t points, double tolerance) {
  if (!(t_lo > 0.0 && t_hi > t_lo) || points < 3) throw ConfigError("check_semigroup_slope: bad time range");
  SlopeCheck c;
  c.tolerance = tolerance;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < points; ++i) {
    const double t = t_lo * std::pow(t_hi / t_lo, static_cast<double>(i) / static_cast<double>(points - 1));
    const auto s = semigroup_norm(op, U, E, t);
    if (!s.power_law) throw ConfigError("check_semigroup_slope: weights must be powers of the eigenvalues");
    c.expected = -s.exponent;
    c.times.push_back(t);
    c.values.push_back(s.value);
    lx.push_back(std::log(t));
    ly.push_back(std::log(s.value));
  }
  c.slope = fit_line(lx, ly).slope;
  c.pass = std::fabs(c.slope - c.expected) <= tolerance;
  return c;
}

RadonifyingVerdict check_radonifying(const SpectralOperator& op, double r, double alpha) {
  if (!(r >= 1.0)) throw ConfigError("check_radonifying: r must be >= 1");
  RadonifyingVerdict v;
  const auto& lam = op.eigenvalues();
  for (double l : lam) v.partial_sum += std::pow(l, -r * alpha);
  const std::size_t n = lam.size();
  if (op.modes()) {
    v.analytic = true;
    v.series_exponent = r * alpha * 2.0 * op.gamma() / static_cast<double>(op.dim());
    v.radonifying = v.series_exponent > 1.0 + 1e-12;
  } else {
    if (n < 8) throw ConfigError("check_radonifying: need at least 8 eigenvalues to extrapolate");
    std::vector<double> lx, ly;
    for (std::size_t j = n / 2; j < n; ++j) {
      lx.push_back(std::log(static_cast<double>(j + 1)));
      ly.push_back(std::log(lam[j]));
    }
    v.series_exponent = r * alpha * fit_line(lx, ly).slope;
    v.radonifying = v.series_exponent > 1.0 + 1e-3;
  }
  if (v.radonifying) {
    // sum_{j > n} j^{-s} scaled by the last retained term
    const double last = std::pow(lam.back(), -r * alpha);
    v.tail_bound = last * static_cast<double>(n) / (v.series_exponent - 1.0);
  } else {
    v.tail_bound = std::numeric_limits<double>::infinity();
  }
  return v;
}

RadonifyingVerdict check_radonifying(const SpaceSpec& U, const SpectralOperator& op) {
  if (U.size() < op.size()) throw ConfigError("check_radonifying: U must cover every retained mode");
  const auto e = power_exponent(std::span<const double>(U.weights().data(), op.size()), op.eigenvalues());
  if (!e) throw ConfigError("check_radonifying: U weights are not a power of the eigenvalues");
  return check_radonifying(op, U.q(), -*e);
}

RadonifyingExponents choose_radonifying_exponents(double p, double gamma, std::size_t dim) {
  const double growth = 2.0 * gamma / static_cast<double>(dim);
  if (!(p > 0.0) || !(p < std::min(growth, 1.0)))
    throw ConfigError("choose_radonifying_exponents: need 0 < p < min(2 gamma / d, 1)");
  const double ra = 0.5 * (1.0 / growth + 1.0 / p);
  return {2.0, 0.5 * ra};
}

// ---------------------------------------------------------------- sampling

namespace {

void check_noise(const SpectralOperator& op, const LevyNoiseSpec& noise) {
  if (noise.wiener.truncation() != op.size())
    throw ConfigError("spectral_ou: noise truncation must equal the number of operator modes");
}

// int_0^h ((1 - e^{-lambda u}) / lambda)^2 du, stable for small lambda h
double integral_square_gap(double lambda, double h) {
  const double x = lambda * h;
  if (x < 1.0) {
    // sum_{m>=2} (-1)^m (2^m - 2) x^{m-2} / ((m+1) m!)
    double sum = 0.0, xp = 1.0, fact = 2.0, pow2 = 4.0;
    for (int m = 2; m < 40; ++m) {
      const double term = (pow2 - 2.0) * xp / ((m + 1) * fact);
      sum += (m % 2 == 0) ? term : -term;
      if (term < 1e-18 * std::fabs(sum)) break;
      xp *= x;
      fact *= (m + 1);
      pow2 *= 2.0;
    }
    return h * h * h * sum;
  }
  return (h + 2.0 * std::expm1(-x) / lambda - std::expm1(-2.0 * x) / (2.0 * lambda)) / (lambda * lambda);
}

}  // namespace

CellMoments drift_cell_moments(double lambda, double h, double slope) {
  if (!(slope > 0.0)) return {};
  const double em = -std::expm1(-lambda * h);
  return {slope * -std::expm1(-2.0 * lambda * h) / (2.0 * lambda), slope * integral_square_gap(lambda, h),
          slope * em * em / (2.0 * lambda * lambda)};
}

std::vector<double> convolution_variance(const SpectralOperator& op, const SubordinatorPath& zpath, double t) {
  if (!(t >= 0.0) || t > zpath.horizon * (1.0 + 1e-12))
    throw ConfigError("convolution_variance: t beyond the subordinator path horizon");
  const auto& lam = op.eigenvalues();
  const double slope = zpath.slope();
  std::vector<double> v(lam.size());
  const auto [first, last] = zpath.jumps_in(0.0, t);
  for (std::size_t j = 0; j < lam.size(); ++j) {
    double s = slope > 0.0 ? slope * -std::expm1(-2.0 * lam[j] * t) / (2.0 * lam[j]) : 0.0;
    for (std::size_t k = first; k < last; ++k)
      s += std::exp(-2.0 * lam[j] * (t - zpath.jumps[k].time)) * zpath.jumps[k].size;
    v[j] = s;
  }
  return v;
}

FieldSample sample_convolution(const SpectralOperator& op, const LevyNoiseSpec& noise, const SubordinatorPath& zpath,
                               double t, std::uint64_t seed) {
  check_noise(op, noise);
  const auto v = convolution_variance(op, zpath, t);
  const auto& w = noise.wiener.weights();
  FieldSample x;
  x.time = t;
  x.modes = op.modes();
  x.coefficients.resize(v.size());
  const std::uint64_t stream = stream_id({tag("ou-convolution")});
  for (std::size_t j = 0; j < v.size(); ++j) x.coefficients[j] = std::sqrt(v[j]) / w[j] * counter_normal(seed, stream, j);
  return x;
}

Trajectory sample_trajectory(const SpectralOperator& op, const LevyNoiseSpec& noise, const SubordinatorPath& zpath,
                             const TimeGrid& grid, std::uint64_t seed, std::span<const double> x0) {
  check_noise(op, noise);
  if (grid.horizon() > zpath.horizon * (1.0 + 1e-12))
    throw ConfigError("sample_trajectory: grid extends beyond the subordinator path horizon");
  const std::size_t n = op.size();
  if (!x0.empty() && x0.size() != n) throw ConfigError("sample_trajectory: initial state has the wrong size");
  const std::size_t cells = grid.cells();
  Trajectory tr;
  tr.grid = grid;
  tr.modes = op.modes();
  tr.states.assign(cells + 1, std::vector<double>(n, 0.0));
  tr.cell_integrals.assign(cells, std::vector<double>(n, 0.0));
  if (!x0.empty()) std::copy(x0.begin(), x0.end(), tr.states[0].begin());

  std::vector<std::pair<std::size_t, std::size_t>> cell_jumps(cells);
  for (std::size_t c = 0; c < cells; ++c) cell_jumps[c] = zpath.jumps_in(grid[c], grid[c + 1]);
  const double slope = zpath.slope();
  const auto& lam = op.eigenvalues();
  const auto& w = noise.wiener.weights();

  parallel_for(n, [&](std::size_t j) {
    const double l = lam[j];
    double x = tr.states[0][j];
    for (std::size_t c = 0; c < cells; ++c) {
      const double t1 = grid[c + 1];
      const double h = t1 - grid[c];
      const double em = -std::expm1(-l * h);  // 1 - e^{-lambda h}
      // A = int e^{-lambda (t1-s)} dY, B = int (1 - e^{-lambda (t1-s)}) / lambda dY
      const auto dm = drift_cell_moments(l, h, slope);
      double va = dm.var_a, vb = dm.var_b, cab = dm.cov;
      for (std::size_t k = cell_jumps[c].first; k < cell_jumps[c].second; ++k) {
        const double u = t1 - zpath.jumps[k].time;
        const double e = std::exp(-l * u);
        const double g = -std::expm1(-l * u) / l;
        const double dz = zpath.jumps[k].size;
        va += e * e * dz;
        vb += g * g * dz;
        cab += e * g * dz;
      }
      double a = 0.0, b = 0.0;
      if (va > 0.0) {
        const std::uint64_t stream = stream_id({tag("ou-cell"), c});
        const double n1 = counter_normal(seed, stream, 2 * j);
        const double n2 = counter_normal(seed, stream, 2 * j + 1);
        const double sa = std::sqrt(va);
        a = sa * n1;
        b = cab / sa * n1 + std::sqrt(std::max(vb - cab * cab / va, 0.0)) * n2;
      }
      tr.cell_integrals[c][j] = x * em / l + b / w[j];
      x = x * std::exp(-l * h) + a / w[j];
      tr.states[c + 1][j] = x;
    }
  });
  return tr;
}

double charfn_oracle(const SpectralOperator& op, const LevyNoiseSpec& noise, std::span<const double> phi, double t,
                     double quad_tol) {
  check_noise(op, noise);
  if (phi.size() != op.size()) throw ConfigError("charfn_oracle: phi must have one coefficient per mode");
  if (!(t >= 0.0)) throw ConfigError("charfn_oracle: t must be >= 0");
  const auto& lam = op.eigenvalues();
  const auto& w = noise.wiener.weights();
  std::vector<double> c2(phi.size());
  bool nonzero = false;
  for (std::size_t j = 0; j < phi.size(); ++j) {
    c2[j] = w[j] * w[j] * phi[j] * phi[j];
    nonzero = nonzero || c2[j] > 0.0;
  }
  if (!nonzero || t == 0.0) return 1.0;
  auto integrand = [&](double s) {
    double h2 = 0.0;
    for (std::size_t j = 0; j < c2.size(); ++j)
      if (c2[j] > 0.0) h2 += std::exp(-2.0 * lam[j] * s) * c2[j];
    return subordinator::laplace_exponent(noise.subordinator, 0.5 * h2, 0.1 * quad_tol);
  };
  // geometric pieces toward s = 0, where the integrand varies on the scales 1/lambda_j
  double lam_max = 0.0;
  for (std::size_t j = 0; j < c2.size(); ++j)
    if (c2[j] > 0.0) lam_max = std::max(lam_max, lam[j]);
  double total = 0.0;
  double hi = t;
  const double floor = std::min(t, 1e-3 / lam_max);
  while (hi > floor) {
    const double lo = std::max(0.25 * hi, floor);
    total += integrate(integrand, lo, hi, quad_tol, 1e-300).value;
    hi = lo;
  }
  total += integrate(integrand, 0.0, hi, quad_tol, 1e-300).value;
  return std::exp(-total);
}

MeanStat empirical_charfn(const SpectralOperator& op, const LevyNoiseSpec& noise, std::span<const double> phi,
                          double t, std::size_t paths, std::uint64_t seed, double cutoff) {
  check_noise(op, noise);
  if (phi.size() != op.size()) throw ConfigError("empirical_charfn: phi must have one coefficient per mode");
  subordinator::PathOptions opts;
  opts.method = subordinator::SamplingMethod::CutoffJumps;
  opts.cutoff = cutoff;
  const auto& w = noise.wiener.weights();
  return mc_mean(paths, seed, tag("ou-charfn"), [&](RandomStream& rng) {
    const std::uint64_t s = rng.next_u64();
    const auto z = subordinator::simulate_path(noise.subordinator, t, opts, s);
    const auto x = sample_convolution(op, noise, z, t, s);
    double pair = 0.0;
    for (std::size_t j = 0; j < phi.size(); ++j) pair += w[j] * w[j] * x.coefficients[j] * phi[j];
    return std::cos(pair);
  });
}

// ---------------------------------------------------------------- regularity bound

RegularityBound regularity_exponent_bound(const SpectralOperator& op, const LevyNoiseSpec& noise,
                                          const RegularityTarget& target, std::optional<double> sub_p) {
  if (!op.modes()) throw ConfigError("regularity_exponent_bound: operator needs mode geometry");
  using subordinator::Kind;
  const auto& sub = noise.subordinator;
  double p;
  if (sub.kind() == Kind::Stable) {
    p = std::max(2.0 * sub.beta(), 1.0);
  } else if (sub.kind() == Kind::DriftOnly) {
    p = 2.0;
  } else {
    if (!sub_p) throw ConfigError("regularity_exponent_bound: noise has no Sub(p) certificate");
    if (!subordinator::sub_p_membership(sub, *sub_p).member)
      throw ConfigError("regularity_exponent_bound: subordinator is not in Sub(p) for the declared p");
    p = *sub_p;
  }
  if (sub.drift() > 0.0) p = 2.0;
  const double g = 2.0 * op.gamma();
  const double d = static_cast<double>(op.dim());
  RegularityBound r;
  r.p = p;
  r.critical = (p <= 1.0 ? g : g / p) - 0.5 * d;
  r.empty = r.critical <= 0.0;
  if (target.kind == RegularityTarget::Kind::Holder)
    r.admissible = !r.empty && target.value >= 0.0 && target.value < r.critical;
  else
    r.admissible = !r.empty && target.value - d / target.q < r.critical;
  return r;
}

}  // namespace levyou::spectral_ou
