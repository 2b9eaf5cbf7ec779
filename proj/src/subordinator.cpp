#include "levyou/subordinator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "levyou/errors.hpp"
#include "levyou/quadrature.hpp"
#include "levyou/rng.hpp"

namespace levyou::subordinator {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// |log xi| beyond this is outside double range
constexpr double kLogRange = 690.0;

// Power-law piece: density c (xi/a)^s on [lo, hi].
struct Piece {
  double lo, hi, a, c, s;
};

// int_u^v xi^k c (xi/a)^s dxi, for lo <= u <= v <= hi.
double piece_moment(const Piece& p, double u, double v, double k) {
  if (!(v > u)) return 0.0;
  const double e = p.s + k + 1.0;
  const double scale = p.c * std::pow(p.a, k + 1.0);
  if (std::fabs(e) < 1e-14) {
    if (u == 0.0 || std::isinf(v)) return kInf;
    return scale * std::log(v / u);
  }
  double top, bottom;
  if (std::isinf(v)) {
    if (e > 0.0) return kInf;
    top = 0.0;
  } else {
    top = std::pow(v / p.a, e);
  }
  if (u == 0.0) {
    if (e < 0.0) return kInf;
    bottom = 0.0;
  } else {
    bottom = std::pow(u / p.a, e);
  }
  return scale * (top - bottom) / e;
}

std::vector<Piece> table_pieces(const std::vector<double>& x, const std::vector<double>& d,
                                const std::vector<double>& slopes, double s_lo, double s_hi) {
  std::vector<Piece> out;
  out.push_back({0.0, x.front(), x.front(), d.front(), s_lo});
  for (std::size_t i = 0; i + 1 < x.size(); ++i) out.push_back({x[i], x[i + 1], x[i], d[i], slopes[i]});
  out.push_back({x.back(), kInf, x.back(), d.back(), s_hi});
  return out;
}

}  // namespace

std::string to_string(Kind k) {
  switch (k) {
    case Kind::Stable: return "stable";
    case Kind::DriftOnly: return "drift-only";
    case Kind::TabulatedDensity: return "tabulated";
    case Kind::CompoundPoisson: return "compound-poisson";
  }
  return "unknown";
}

// ---------------------------------------------------------------- measures

IntensityMeasure IntensityMeasure::empty() { return IntensityMeasure{}; }

IntensityMeasure IntensityMeasure::stable(double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("stable intensity: beta must lie in (0,1)");
  IntensityMeasure m;
  m.form_ = Form::StablePower;
  m.beta_ = beta;
  m.c_stable_ = beta / std::tgamma(1.0 - beta);
  return m;
}

IntensityMeasure IntensityMeasure::tabulated(std::vector<double> nodes, std::vector<double> density,
                                             std::optional<double> lower_exponent,
                                             std::optional<double> upper_exponent) {
  if (nodes.size() < 2 || nodes.size() != density.size())
    throw ConfigError("tabulated intensity: need >= 2 nodes and one density value per node");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!(nodes[i] > 0.0) || !std::isfinite(nodes[i])) throw ConfigError("tabulated intensity: nodes must be positive");
    if (i > 0 && !(nodes[i] > nodes[i - 1])) throw ConfigError("tabulated intensity: nodes must be increasing");
    if (!(density[i] > 0.0) || !std::isfinite(density[i]))
      throw ConfigError("tabulated intensity: density values must be positive and finite");
  }
  IntensityMeasure m;
  m.form_ = Form::Table;
  m.slopes_.resize(nodes.size() - 1);
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
    m.slopes_[i] = std::log(density[i + 1] / density[i]) / std::log(nodes[i + 1] / nodes[i]);
  m.s_lo_ = lower_exponent.value_or(m.slopes_.front());
  m.s_hi_ = upper_exponent.value_or(m.slopes_.back());
  m.nodes_ = std::move(nodes);
  m.dens_ = std::move(density);
  return m;
}

IntensityMeasure IntensityMeasure::atoms(std::vector<Atom> atoms) {
  for (const auto& a : atoms)
    if (!(a.size > 0.0) || !(a.rate >= 0.0) || !std::isfinite(a.size) || !std::isfinite(a.rate))
      throw ConfigError("compound Poisson intensity: atom sizes must be positive and rates nonnegative");
  std::sort(atoms.begin(), atoms.end(), [](const Atom& x, const Atom& y) { return x.size < y.size; });
  IntensityMeasure m;
  m.form_ = Form::Atoms;
  m.atoms_ = std::move(atoms);
  return m;
}

double IntensityMeasure::density(double xi) const {
  if (!(xi > 0.0)) return 0.0;
  switch (form_) {
    case Form::StablePower: return c_stable_ * std::pow(xi, -1.0 - beta_);
    case Form::Table: {
      for (const auto& p : table_pieces(nodes_, dens_, slopes_, s_lo_, s_hi_))
        if (xi <= p.hi) return p.c * std::pow(xi / p.a, p.s);
      return 0.0;
    }
    default: return 0.0;
  }
}

double IntensityMeasure::tail_mass(double x) const {
  switch (form_) {
    case Form::Empty: return 0.0;
    case Form::StablePower: return x > 0.0 ? std::pow(x, -beta_) / std::tgamma(1.0 - beta_) : kInf;
    case Form::Atoms: {
      double s = 0.0;
      for (const auto& a : atoms_)
        if (a.size >= x) s += a.rate;
      return s;
    }
    case Form::Table: {
      double s = 0.0;
      for (const auto& p : table_pieces(nodes_, dens_, slopes_, s_lo_, s_hi_))
        if (p.hi > x) s += piece_moment(p, std::max(p.lo, x), p.hi, 0.0);
      return s;
    }
  }
  return 0.0;
}

double IntensityMeasure::total_mass() const { return tail_mass(0.0); }

double IntensityMeasure::truncated_first_moment(double eps) const {
  switch (form_) {
    case Form::Empty: return 0.0;
    case Form::StablePower: return c_stable_ * std::pow(eps, 1.0 - beta_) / (1.0 - beta_);
    case Form::Atoms: {
      double s = 0.0;
      for (const auto& a : atoms_)
        if (a.size < eps) s += a.size * a.rate;
      return s;
    }
    case Form::Table: {
      double s = 0.0;
      for (const auto& p : table_pieces(nodes_, dens_, slopes_, s_lo_, s_hi_))
        if (p.lo < eps) s += piece_moment(p, p.lo, std::min(p.hi, eps), 1.0);
      return s;
    }
  }
  return 0.0;
}

double IntensityMeasure::lower_moment(double k) const {
  switch (form_) {
    case Form::Empty: return 0.0;
    case Form::StablePower: return k > beta_ ? c_stable_ / (k - beta_) : kInf;
    case Form::Atoms: {
      double s = 0.0;
      for (const auto& a : atoms_)
        if (a.size <= 1.0) s += std::pow(a.size, k) * a.rate;
      return s;
    }
    case Form::Table: {
      double s = 0.0;
      for (const auto& p : table_pieces(nodes_, dens_, slopes_, s_lo_, s_hi_))
        if (p.lo < 1.0) s += piece_moment(p, p.lo, std::min(p.hi, 1.0), k);
      return s;
    }
  }
  return 0.0;
}

double IntensityMeasure::moment(double k, double lo, double hi) const {
  if (!(hi > lo)) return 0.0;
  switch (form_) {
    case Form::Empty: return 0.0;
    case Form::StablePower: {
      const double e = k - beta_;
      if (e == 0.0) return lo == 0.0 || std::isinf(hi) ? kInf : c_stable_ * std::log(hi / lo);
      if ((e < 0.0 && lo == 0.0) || (e > 0.0 && std::isinf(hi))) return kInf;
      const double top = std::isinf(hi) ? 0.0 : std::pow(hi, e);
      const double bottom = lo == 0.0 ? 0.0 : std::pow(lo, e);
      return c_stable_ * (top - bottom) / e;
    }
    case Form::Atoms: {
      double s = 0.0;
      for (const auto& a : atoms_)
        if (a.size >= lo && a.size < hi) s += std::pow(a.size, k) * a.rate;
      return s;
    }
    case Form::Table: {
      double s = 0.0;
      for (const auto& p : table_pieces(nodes_, dens_, slopes_, s_lo_, s_hi_)) {
        const double a = std::max(p.lo, lo), b = std::min(p.hi, hi);
        if (b > a) s += piece_moment(p, a, b, k);
      }
      return s;
    }
  }
  return 0.0;
}

double IntensityMeasure::small_jump_index(bool* attained) const {
  double idx = 0.0;
  bool att = true;
  if (form_ == Form::StablePower) {
    idx = beta_;
    att = false;
  } else if (form_ == Form::Table) {
    // int_0 xi^{k+s} converges iff k + s > -1
    if (-1.0 - s_lo_ >= 0.0) {
      idx = -1.0 - s_lo_;
      att = false;
    }
  }
  if (attained) *attained = att;
  return idx;
}

double IntensityMeasure::sample_above(double eps, double u) const {
  switch (form_) {
    case Form::Empty: throw ConfigError("sample_above: empty intensity measure");
    case Form::StablePower: return eps * std::pow(u, -1.0 / beta_);
    case Form::Atoms: {
      const double total = tail_mass(eps);
      double target = u * total, cum = 0.0;
      const Atom* last = nullptr;
      for (const auto& a : atoms_) {
        if (a.size < eps || a.rate == 0.0) continue;
        last = &a;
        cum += a.rate;
        if (target <= cum) return a.size;
      }
      if (!last) throw ConfigError("sample_above: no atoms above the cutoff");
      return last->size;
    }
    case Form::Table: {
      const auto pieces = table_pieces(nodes_, dens_, slopes_, s_lo_, s_hi_);
      const double target = u * tail_mass(eps);
      double above = 0.0;
      for (auto it = pieces.rbegin(); it != pieces.rend(); ++it) {
        const Piece& p = *it;
        if (p.hi <= eps) break;
        const double lo = std::max(p.lo, eps);
        const double m = piece_moment(p, lo, p.hi, 0.0);
        if (above + m >= target) {
          const double need = target - above;  // mass of [x, hi]
          const double e = p.s + 1.0;
          double x;
          if (std::fabs(e) < 1e-14) {
            x = p.hi * std::exp(-need / (p.c * p.a));
          } else {
            const double top = std::isinf(p.hi) ? 0.0 : std::pow(p.hi / p.a, e);
            const double v = top - e * need / (p.c * p.a);
            x = p.a * std::pow(v, 1.0 / e);
          }
          return std::clamp(x, lo, p.hi);
        }
        above += m;
      }
      return eps;
    }
  }
  return eps;
}

double IntensityMeasure::integrate(const std::function<double(double)>& g, double rel_tol) const {
  return integrate(g, rel_tol, 0.0, kInf);
}

double IntensityMeasure::integrate(const std::function<double(double)>& g, double rel_tol, double lo,
                                   double hi) const {
  if (!(hi > lo)) return 0.0;
  const double ulo = lo > 0.0 ? std::log(lo) : -kLogRange;
  const double uhi = std::isinf(hi) ? kLogRange : std::log(hi);
  switch (form_) {
    case Form::Empty: return 0.0;
    case Form::Atoms: {
      double s = 0.0;
      for (const auto& a : atoms_)
        if (a.size >= lo && a.size < hi) s += g(a.size) * a.rate;
      return s;
    }
    case Form::StablePower: {
      auto f = [&](double u) { return g(std::exp(u)) * c_stable_ * std::exp(-beta_ * u); };
      if (ulo < 0.0 && uhi > 0.0)
        return levyou::integrate(f, ulo, 0.0, rel_tol).value + levyou::integrate(f, 0.0, uhi, rel_tol).value;
      return levyou::integrate(f, ulo, uhi, rel_tol).value;
    }
    case Form::Table: {
      double s = 0.0;
      for (const auto& p : table_pieces(nodes_, dens_, slopes_, s_lo_, s_hi_)) {
        const double log_a = std::log(p.a);
        auto f = [&](double u) { return g(std::exp(u)) * p.c * std::exp(p.s * (u - log_a) + u); };
        const double a = std::max(p.lo == 0.0 ? -kLogRange : std::log(p.lo), ulo);
        const double b = std::min(std::isinf(p.hi) ? kLogRange : std::log(p.hi), uhi);
        if (b > a) s += levyou::integrate(f, a, b, rel_tol).value;
      }
      return s;
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------- specs

SubordinatorSpec::SubordinatorSpec(Kind k, double drift, IntensityMeasure m)
    : kind_(k), drift_(drift), intensity_(std::move(m)) {
  if (!(drift_ >= 0.0) || !std::isfinite(drift_)) throw ConfigError("subordinator: drift must be finite and >= 0");
  // Levy-measure integrability: int_1^inf rho < inf and int_0^1 xi rho < inf
  if (!std::isfinite(intensity_.tail_mass(1.0)))
    throw ConfigError("subordinator: intensity has infinite mass on [1, inf)");
  if (!std::isfinite(intensity_.lower_moment(1.0)))
    throw ConfigError("subordinator: int_0^1 xi rho(dxi) diverges");
  if (kind_ == Kind::TabulatedDensity) {
    // cross-check the analytic piece integrals against quadrature over the table span
    const auto& x = intensity_.nodes();
    const double hi = std::min(1.0, x.back());
    if (x.front() < hi) {
      const double quad =
          levyou::integrate([&](double xi) { return xi * intensity_.density(xi); }, x.front(), hi, 1e-8).value;
      const double exact = intensity_.truncated_first_moment(hi) - intensity_.truncated_first_moment(x.front());
      if (std::fabs(quad - exact) > 1e-6 * std::max(1.0, std::fabs(exact)))
        throw NumericError("tabulated intensity: quadrature and analytic first moment disagree");
    }
  }
}

SubordinatorSpec SubordinatorSpec::stable(double beta, double drift) {
  return SubordinatorSpec(Kind::Stable, drift, IntensityMeasure::stable(beta));
}

SubordinatorSpec SubordinatorSpec::drift_only(double drift) {
  return SubordinatorSpec(Kind::DriftOnly, drift, IntensityMeasure::empty());
}

SubordinatorSpec SubordinatorSpec::tabulated(IntensityMeasure measure, double drift) {
  if (measure.form() != IntensityMeasure::Form::Table) throw ConfigError("tabulated subordinator needs a table measure");
  return SubordinatorSpec(Kind::TabulatedDensity, drift, std::move(measure));
}

SubordinatorSpec SubordinatorSpec::compound_poisson(std::vector<Atom> atoms, double drift) {
  return SubordinatorSpec(Kind::CompoundPoisson, drift, IntensityMeasure::atoms(std::move(atoms)));
}

// ---------------------------------------------------------------- analysis

double laplace_exponent(const SubordinatorSpec& spec, double r, double rel_tol) {
  if (!(r >= 0.0)) throw ConfigError("laplace_exponent: r must be >= 0");
  if (r == 0.0) return 0.0;
  const double drift = spec.drift() * r;
  switch (spec.kind()) {
    case Kind::Stable: return drift + std::pow(r, spec.beta());
    case Kind::DriftOnly: return drift;
    case Kind::CompoundPoisson:
    case Kind::TabulatedDensity:
      return drift + spec.intensity().integrate([r](double xi) { return -std::expm1(-r * xi); }, rel_tol);
  }
  return drift;
}

Membership sub_p_membership(const SubordinatorSpec& spec, double p) {
  if (!(p > 0.0 && p <= 2.0)) throw ConfigError("sub_p_membership: p must lie in (0,2]");
  const double c = spec.intensity().lower_moment(0.5 * p);
  return {std::isfinite(c), c};
}

bool finite_variation_diagnostic(const SubordinatorSpec& spec) {
  // a Brownian component (drift of Z) always has infinite variation
  if (spec.drift() > 0.0) return false;
  return std::isfinite(spec.intensity().lower_moment(0.5));
}

// ---------------------------------------------------------------- paths

double SubordinatorPath::value(double t) const {
  if (t <= 0.0) return 0.0;
  double z = slope() * std::min(t, horizon);
  for (const auto& j : jumps) {
    if (j.time > t) break;
    z += j.size;
  }
  return z;
}

std::pair<std::size_t, std::size_t> SubordinatorPath::jumps_in(double s, double t) const {
  auto first = std::upper_bound(jumps.begin(), jumps.end(), s, [](double v, const Jump& j) { return v < j.time; });
  auto last = std::upper_bound(jumps.begin(), jumps.end(), t, [](double v, const Jump& j) { return v < j.time; });
  return {static_cast<std::size_t>(first - jumps.begin()), static_cast<std::size_t>(last - jumps.begin())};
}

double SubordinatorPath::increment(double s, double t) const {
  if (!(t > s)) return 0.0;
  auto [a, b] = jumps_in(s, t);
  double z = slope() * (std::min(t, horizon) - std::max(s, 0.0));
  for (std::size_t k = a; k < b; ++k) z += jumps[k].size;
  return z;
}

double sample_stable(double beta, double u_angle, double e_exp) {
  const double u = u_angle;
  const double a = std::sin(beta * u) / std::pow(std::sin(u), 1.0 / beta);
  const double b = std::pow(std::sin((1.0 - beta) * u) / e_exp, (1.0 - beta) / beta);
  return a * b;
}

SubordinatorPath simulate_path(const SubordinatorSpec& spec, double horizon, const PathOptions& opts,
                               std::uint64_t seed) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("simulate_path: horizon must be positive");
  SubordinatorPath path;
  path.horizon = horizon;
  path.drift_slope = spec.drift();
  RandomStream rng(seed, stream_id({tag("subordinator-path")}));

  const bool exact = spec.kind() == Kind::Stable && opts.method != SamplingMethod::CutoffJumps;
  if (opts.method == SamplingMethod::ExactGrid && spec.kind() != Kind::Stable)
    throw ConfigError("simulate_path: exact grid sampling is only available for the stable kind");

  if (exact) {
    const TimeGrid grid = opts.grid ? *opts.grid : TimeGrid::uniform(horizon, std::max<std::size_t>(1, opts.grid_cells));
    if (std::fabs(grid.horizon() - horizon) > 1e-12 * horizon)
      throw ConfigError("simulate_path: grid does not end at the horizon");
    const double beta = spec.beta();
    path.jumps.reserve(grid.cells());
    for (std::size_t i = 1; i < grid.points().size(); ++i) {
      const double h = grid[i] - grid[i - 1];
      const double s = sample_stable(beta, std::numbers::pi * rng.uniform(), rng.exponential());
      const double dz = std::pow(h, 1.0 / beta) * s;
      if (dz > 0.0) path.jumps.push_back({grid[i], dz});
    }
    return path;
  }

  if (spec.kind() == Kind::DriftOnly) return path;
  const double eps = opts.cutoff;
  if (!(eps > 0.0 && eps <= 1.0)) throw ConfigError("simulate_path: cutoff must lie in (0,1]");
  const auto& rho = spec.intensity();
  const double rate = rho.tail_mass(eps);
  if (!std::isfinite(rate)) throw ConfigError("simulate_path: rho([eps, inf)) is infinite");
  path.small_jump_compensation = rho.truncated_first_moment(eps);
  const std::uint64_t count = rng.poisson(rate * horizon);
  std::vector<double> times(count);
  for (auto& t : times) t = horizon * rng.uniform();
  std::sort(times.begin(), times.end());
  path.jumps.reserve(count);
  for (double t : times) {
    const double size = rho.sample_above(eps, rng.uniform());
    if (!path.jumps.empty() && path.jumps.back().time == t)
      path.jumps.back().size += size;
    else
      path.jumps.push_back({t, size});
  }
  return path;
}

void write_path_csv(std::ostream& os, const SubordinatorPath& path) {
  os.precision(17);
  os << "# horizon=" << path.horizon << "\n# slope=" << path.slope() << "\n# drift_slope=" << path.drift_slope
     << "\n# small_jump_compensation=" << path.small_jump_compensation << "\ntau,delta_z\n";
  for (const auto& j : path.jumps) os << j.time << ',' << j.size << '\n';
}

}  // namespace levyou::subordinator
