#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "levyou/time_grid.hpp"

namespace levyou::subordinator {

enum class Kind { Stable, DriftOnly, TabulatedDensity, CompoundPoisson };
std::string to_string(Kind k);

struct Atom {
  double size;
  double rate;
};

// Levy measure rho on (0, inf).
class IntensityMeasure {
 public:
  enum class Form { Empty, StablePower, Table, Atoms };

  static IntensityMeasure empty();
  // beta/Gamma(1-beta) xi^{-1-beta}, so that int (1 - e^{-r xi}) rho(dxi) = r^beta.
  static IntensityMeasure stable(double beta);
  // Density given at increasing nodes, interpolated piecewise as a power law
  // (linear in log-log). Outside the table the density continues as a power
  // law with the given exponents (default: the first/last segment slopes).
  static IntensityMeasure tabulated(std::vector<double> nodes, std::vector<double> density,
                                    std::optional<double> lower_exponent = std::nullopt,
                                    std::optional<double> upper_exponent = std::nullopt);
  static IntensityMeasure atoms(std::vector<Atom> atoms);

  Form form() const noexcept { return form_; }
  double beta() const noexcept { return beta_; }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& table_density() const noexcept { return dens_; }
  double lower_exponent() const noexcept { return s_lo_; }
  double upper_exponent() const noexcept { return s_hi_; }
  const std::vector<Atom>& atom_list() const noexcept { return atoms_; }

  double density(double xi) const;                  // 0 for atoms
  double tail_mass(double x) const;                 // rho([x, inf))
  double total_mass() const;                        // may be +inf
  double truncated_first_moment(double eps) const;  // int_(0,eps) xi rho(dxi)
  double lower_moment(double k) const;              // int_(0,1] xi^k rho(dxi), +inf if divergent
  double moment(double k, double lo, double hi) const;  // int_[lo,hi) xi^k rho(dxi), +inf if divergent
  // inf{k : lower_moment(k) < inf}; `attained` tells whether the infimum itself is finite.
  double small_jump_index(bool* attained = nullptr) const;
  // Inverse of the normalized tail on [eps, inf): u in (0,1) -> jump size >= eps.
  double sample_above(double eps, double u) const;
  // int g d rho over (0, inf); densities by adaptive quadrature in log-coordinates.
  double integrate(const std::function<double(double)>& g, double rel_tol = 1e-8) const;
  // Same over [lo, hi) only.
  double integrate(const std::function<double(double)>& g, double rel_tol, double lo, double hi) const;

 private:
  Form form_ = Form::Empty;
  double beta_ = 0.0;
  double c_stable_ = 0.0;
  std::vector<double> nodes_, dens_, slopes_;
  double s_lo_ = 0.0, s_hi_ = 0.0;
  std::vector<Atom> atoms_;  // sorted by size
};

class SubordinatorSpec {
 public:
  static SubordinatorSpec stable(double beta, double drift = 0.0);
  static SubordinatorSpec drift_only(double drift);
  static SubordinatorSpec tabulated(IntensityMeasure measure, double drift = 0.0);
  static SubordinatorSpec compound_poisson(std::vector<Atom> atoms, double drift = 0.0);

  Kind kind() const noexcept { return kind_; }
  double drift() const noexcept { return drift_; }
  double beta() const noexcept { return intensity_.beta(); }  // Stable only
  const IntensityMeasure& intensity() const noexcept { return intensity_; }

 private:
  SubordinatorSpec(Kind k, double drift, IntensityMeasure m);
  Kind kind_;
  double drift_;
  IntensityMeasure intensity_;
};

struct Jump {
  double time;
  double size;
};

struct SubordinatorPath {
  double horizon = 0.0;
  double drift_slope = 0.0;
  double small_jump_compensation = 0.0;  // per unit time
  std::vector<Jump> jumps;               // strictly increasing times in (0, horizon]

  double slope() const noexcept { return drift_slope + small_jump_compensation; }
  double value(double t) const;
  double increment(double s, double t) const;  // Z(t) - Z(s)
  // Half-open index range [first, last) of jumps with time in (s, t].
  std::pair<std::size_t, std::size_t> jumps_in(double s, double t) const;
};

enum class SamplingMethod { Auto, ExactGrid, CutoffJumps };

struct PathOptions {
  double cutoff = 1e-4;
  // Auto: exact-grid sampling for Stable, cutoff sampler otherwise.
  SamplingMethod method = SamplingMethod::Auto;
  // Nodes for exact-grid sampling; default is a uniform grid of `grid_cells` cells.
  std::optional<TimeGrid> grid;
  std::size_t grid_cells = 1;
};

double laplace_exponent(const SubordinatorSpec& spec, double r, double rel_tol = 1e-8);

struct Membership {
  bool member;
  double certificate;  // int_0^1 xi^{p/2} rho(dxi), +inf when divergent
};
Membership sub_p_membership(const SubordinatorSpec& spec, double p);

// Finite variation of the scalar subordinated process W(Z(t)).
bool finite_variation_diagnostic(const SubordinatorSpec& spec);

// One-sided stable variate with E exp(-r S) = exp(-r^beta) (Kanter's representation).
double sample_stable(double beta, double u_angle, double e_exp);

SubordinatorPath simulate_path(const SubordinatorSpec& spec, double horizon, const PathOptions& opts,
                               std::uint64_t seed);

void write_path_csv(std::ostream& os, const SubordinatorPath& path);

}  // namespace levyou::subordinator
