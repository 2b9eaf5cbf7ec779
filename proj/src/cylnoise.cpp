#include "levyou/cylnoise.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <ostream>

#include "levyou/errors.hpp"
#include "levyou/parallel.hpp"
#include "levyou/quadrature.hpp"
#include "levyou/rng.hpp"

namespace levyou::cylnoise {

using subordinator::Kind;
using subordinator::SubordinatorPath;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------- Wiener spec

CylindricalWienerSpec::CylindricalWienerSpec(std::vector<double> weights, double hilbert_order)
    : w_(std::move(weights)), order_(hilbert_order) {
  if (w_.empty()) throw ConfigError("CylindricalWienerSpec: truncation must be >= 1");
  for (double w : w_)
    if (!(w > 0.0) || !std::isfinite(w)) throw ConfigError("CylindricalWienerSpec: weights must be positive");
}

CylindricalWienerSpec CylindricalWienerSpec::unit(std::size_t n) {
  return CylindricalWienerSpec(std::vector<double>(n, 1.0), 0.0);
}

CylindricalWienerSpec CylindricalWienerSpec::hilbert_scale(const ModeSet& modes, double theta) {
  return CylindricalWienerSpec(SpaceSpec::hilbert_scale(modes, theta).weights(), theta);
}

double CylindricalWienerSpec::squared_norm(std::span<const double> phi) const {
  const std::size_t n = std::min(phi.size(), w_.size());
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) s += w_[j] * w_[j] * phi[j] * phi[j];
  return s;
}

double CylindricalWienerSpec::pairing(std::span<const double> y, std::span<const double> phi) const {
  const std::size_t n = std::min({y.size(), phi.size(), w_.size()});
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) s += w_[j] * w_[j] * y[j] * phi[j];
  return s;
}

CylindricalWienerSpec CylindricalWienerSpec::prefix(std::size_t n) const {
  if (n == 0 || n > w_.size()) throw ConfigError("CylindricalWienerSpec::prefix: n out of range");
  return CylindricalWienerSpec(std::vector<double>(w_.begin(), w_.begin() + static_cast<long>(n)), order_);
}

// ---------------------------------------------------------------- functionals

double char_functional(const LevyNoiseSpec& spec, std::span<const double> phi, double t) {
  if (!(t >= 0.0)) throw ConfigError("char_functional: t must be >= 0");
  return std::exp(-t * subordinator::laplace_exponent(spec.subordinator, 0.5 * spec.wiener.squared_norm(phi)));
}

std::vector<NoiseIncrementSample> sample_increments(const LevyNoiseSpec& spec, const SubordinatorPath& zpath,
                                                    const TimeGrid& grid, std::uint64_t seed) {
  if (grid.horizon() > zpath.horizon * (1.0 + 1e-12))
    throw ConfigError("sample_increments: grid extends beyond the subordinator path horizon");
  const auto& w = spec.wiener.weights();
  RandomStream rng(seed, stream_id({tag("noise-increments")}));
  std::vector<NoiseIncrementSample> out(grid.cells());
  for (std::size_t i = 0; i < grid.cells(); ++i) {
    auto& cell = out[i];
    cell.t0 = grid[i];
    cell.t1 = grid[i + 1];
    cell.generating_dz = zpath.increment(cell.t0, cell.t1);
    cell.coefficients.resize(w.size());
    const double sd = std::sqrt(cell.generating_dz);
    for (std::size_t j = 0; j < w.size(); ++j) cell.coefficients[j] = sd / w[j] * rng.normal();
  }
  return out;
}

void write_increments_csv(std::ostream& os, const std::vector<NoiseIncrementSample>& cells, const ModeSet& modes) {
  os.precision(17);
  os << "cell,t0,t1,delta_z";
  for (std::size_t i = 0; i < modes.dim(); ++i) os << ",n" << i + 1;
  os << ",value\n";
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto& cell = cells[c];
    for (std::size_t j = 0; j < cell.coefficients.size() && j < modes.size(); ++j) {
      os << c << ',' << cell.t0 << ',' << cell.t1 << ',' << cell.generating_dz;
      for (auto n : modes.multi_index(j)) os << ',' << n;
      os << ',' << cell.coefficients[j] << '\n';
    }
  }
}

// ---------------------------------------------------------------- mark norm law

MarkNormLaw::MarkNormLaw(const CylindricalWienerSpec& wiener, const SpaceSpec& U, std::size_t table_size,
                         std::uint64_t seed) {
  const std::size_t n = std::min(wiener.truncation(), U.size());
  const auto& w = wiener.weights();
  const auto& b = U.weights();
  if (U.q() == 2.0) {
    const double r0 = b[0] / w[0];
    bool proportional = true;
    for (std::size_t j = 1; j < n && proportional; ++j)
      proportional = std::fabs(b[j] / w[j] - r0) <= 1e-12 * r0;
    if (proportional) {
      exact_ = true;
      scale_ = r0;
      dof_ = static_cast<double>(n);
      return;
    }
  }
  if (table_size < 16) throw ConfigError("MarkNormLaw: table size too small");
  RandomStream rng(seed, stream_id({tag("mark-norm-table")}));
  table_.resize(table_size);
  std::vector<double> g(n);
  for (auto& v : table_) {
    for (std::size_t j = 0; j < n; ++j) g[j] = rng.normal() / w[j];
    v = U.norm(g);
  }
  std::sort(table_.begin(), table_.end());
}

double MarkNormLaw::cdf(double r) const {
  if (!(r > 0.0)) return 0.0;
  if (std::isinf(r)) return 1.0;
  if (exact_) return boost::math::gamma_p(0.5 * dof_, 0.5 * (r / scale_) * (r / scale_));
  const auto it = std::upper_bound(table_.begin(), table_.end(), r);
  return static_cast<double>(it - table_.begin()) / static_cast<double>(table_.size());
}

double MarkNormLaw::survival(double r) const {
  if (!(r > 0.0)) return 1.0;
  if (std::isinf(r)) return 0.0;
  if (exact_) return boost::math::gamma_q(0.5 * dof_, 0.5 * (r / scale_) * (r / scale_));
  const auto it = std::lower_bound(table_.begin(), table_.end(), r);
  return static_cast<double>(table_.end() - it) / static_cast<double>(table_.size());
}

double MarkNormLaw::moment(double p) const {
  if (exact_) {
    const double k = 0.5 * dof_;
    return std::pow(scale_, p) * std::pow(2.0, 0.5 * p) * std::exp(std::lgamma(k + 0.5 * p) - std::lgamma(k));
  }
  double s = 0.0;
  for (double v : table_) s += std::pow(v, p);
  return s / static_cast<double>(table_.size());
}

double MarkNormLaw::partial_moment(double p, double a) const {
  if (!(a > 0.0)) return 0.0;
  if (std::isinf(a)) return moment(p);
  if (exact_) {
    const double k = 0.5 * dof_;
    return moment(p) * boost::math::gamma_p(k + 0.5 * p, 0.5 * (a / scale_) * (a / scale_));
  }
  double s = 0.0;
  for (double v : table_) {
    if (v >= a) break;
    s += std::pow(v, p);
  }
  return s / static_cast<double>(table_.size());
}

double intensity_measure_functional(const LevyNoiseSpec& spec, const RadialTest& test, const SpaceSpec& U,
                                    double quad_tol, double s_lo, double s_hi) {
  const auto& rho = spec.subordinator.intensity();
  if (test.kind == RadialTest::Kind::Constant) {
    if (test.c == 0.0) return 0.0;
    return test.c * rho.moment(0.0, s_lo, s_hi);
  }
  const MarkNormLaw law(spec.wiener, U);
  if (law.exact()) {
    std::function<double(double)> inner;
    switch (test.kind) {
      case RadialTest::Kind::IndicatorAtLeast:
        inner = [&](double s) { return law.survival(test.c / std::sqrt(s)); };
        break;
      case RadialTest::Kind::PowerBelow:
        inner = [&](double s) { return std::pow(s, 0.5 * test.p) * law.partial_moment(test.p, test.c / std::sqrt(s)); };
        break;
      default:
        // E g(sqrt(s) R) with R = scale * sqrt(X), X chi-square(dof)
        inner = [&](double s) {
          const double k = 0.5 * law.dof();
          const double log_norm = -k * std::log(2.0) - std::lgamma(k);
          return levyou::integrate(
                     [&](double x) {
                       if (x <= 0.0) return 0.0;
                       const double dens = std::exp(log_norm + (k - 1.0) * std::log(x) - 0.5 * x);
                       return test.g(std::sqrt(s * x) * law.scale()) * dens;
                     },
                     0.0, kInf, std::max(1e-2 * quad_tol, 1e-13))
              .value;
        };
        break;
    }
    return rho.integrate(inner, quad_tol, s_lo, s_hi);
  }
  const auto& r = law.samples();
  const double n = static_cast<double>(r.size());
  switch (test.kind) {
    case RadialTest::Kind::IndicatorAtLeast: {
      double s = 0.0;
      for (double v : r) s += rho.moment(0.0, std::max(s_lo, test.c * test.c / (v * v)), s_hi);
      return s / n;
    }
    case RadialTest::Kind::PowerBelow: {
      double s = 0.0;
      for (double v : r) s += std::pow(v, test.p) * rho.moment(0.5 * test.p, s_lo, std::min(s_hi, test.c * test.c / (v * v)));
      return s / n;
    }
    default:
      return rho.integrate(
          [&](double s) {
            double acc = 0.0;
            for (double v : r) acc += test.g(std::sqrt(s) * v);
            return acc / n;
          },
          quad_tol, s_lo, s_hi);
  }
}

double fernique_constant(const CylindricalWienerSpec& wiener, const SpaceSpec& U) {
  if (U.q() != 2.0) throw ConfigError("fernique_constant: U must be Hilbertian (q = 2)");
  const std::size_t n = std::min(wiener.truncation(), U.size());
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double r = U.weights()[j] / wiener.weights()[j];
    s += r * r;
  }
  return s;
}

namespace {

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

FiniteVariationVerdict finite_variation_test(const LevyNoiseSpec& spec, const SpaceSpec& U, std::size_t mc_paths,
                                             std::uint64_t seed, const FiniteVariationOptions& opts) {
  if (opts.finest_level < 2 || opts.finest_level > 24 || opts.fit_levels < 2 || opts.fit_levels > opts.finest_level)
    throw ConfigError("finite_variation_test: invalid refinement levels");
  FiniteVariationVerdict v;
  const auto& sub = spec.subordinator;
  v.analytic_finite = sub.drift() == 0.0 && std::isfinite(sub.intensity().lower_moment(0.5));
  v.criterion_value = v.analytic_finite
                          ? intensity_measure_functional(spec, RadialTest::power_below(1.0, 1.0), U, 1e-8, 0.0, 1.0)
                          : kInf;
  if (mc_paths == 0) return v;

  const std::size_t cells = std::size_t{1} << opts.finest_level;
  const std::size_t n = std::min(spec.wiener.truncation(), U.size());
  const auto& w = spec.wiener.weights();
  const TimeGrid grid = TimeGrid::uniform(opts.horizon, cells);
  subordinator::PathOptions popt;
  popt.cutoff = opts.cutoff;
  if (sub.kind() == Kind::Stable) popt.grid = grid;

  const unsigned levels = opts.finest_level + 1;
  std::vector<std::vector<double>> tv(mc_paths, std::vector<double>(levels, 0.0));
  parallel_for(mc_paths, [&](std::size_t path) {
    const auto z = subordinator::simulate_path(sub, opts.horizon, popt, stream_id({seed, tag("fv-z"), path}));
    RandomStream rng(seed, stream_id({tag("fv-y"), path}));
    std::vector<double> inc(cells * n);
    for (std::size_t c = 0; c < cells; ++c) {
      const double sd = std::sqrt(z.increment(grid[c], grid[c + 1]));
      for (std::size_t j = 0; j < n; ++j) inc[c * n + j] = sd / w[j] * rng.normal();
    }
    std::size_t m = cells;
    for (unsigned lvl = levels; lvl-- > 0;) {
      double s = 0.0;
      for (std::size_t c = 0; c < m; ++c) s += U.norm(std::span<const double>(inc.data() + c * n, n));
      tv[path][lvl] = s;
      if (lvl == 0) break;
      for (std::size_t c = 0; c < m / 2; ++c)
        for (std::size_t j = 0; j < n; ++j) inc[c * n + j] = inc[2 * c * n + j] + inc[(2 * c + 1) * n + j];
      m /= 2;
    }
  });
  v.cells.resize(levels);
  v.mean_variation.assign(levels, 0.0);
  for (unsigned lvl = 0; lvl < levels; ++lvl) {
    v.cells[lvl] = static_cast<double>(std::size_t{1} << lvl);
    for (std::size_t p = 0; p < mc_paths; ++p) v.mean_variation[lvl] += tv[p][lvl];
    v.mean_variation[lvl] /= static_cast<double>(mc_paths);
  }
  std::vector<double> lx, ly;
  for (unsigned lvl = levels - opts.fit_levels; lvl < levels; ++lvl) {
    lx.push_back(std::log(v.cells[lvl]));
    ly.push_back(std::log(v.mean_variation[lvl]));
  }
  v.slope = fit_slope(lx, ly);
  v.empirical_finite = v.slope < opts.growth_slope;
  v.agree = v.empirical_finite == v.analytic_finite;
  return v;
}

}  // namespace levyou::cylnoise
