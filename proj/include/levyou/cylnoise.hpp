#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "levyou/modes.hpp"
#include "levyou/space.hpp"
#include "levyou/subordinator.hpp"
#include "levyou/time_grid.hpp"

namespace levyou::cylnoise {

// H-cylindrical Wiener process on N sine modes. Coefficients are taken in the
// L^2 sine basis; H carries the norm |phi|_H^2 = sum w_j^2 phi_j^2, so the
// L^2 coefficient of W(s) in mode j has variance s / w_j^2.
class CylindricalWienerSpec {
 public:
  explicit CylindricalWienerSpec(std::vector<double> weights, double hilbert_order = 0.0);
  static CylindricalWienerSpec unit(std::size_t n);
  // H = H^{theta,2}: w_j = mu_j^{theta/2}
  static CylindricalWienerSpec hilbert_scale(const ModeSet& modes, double theta);

  std::size_t truncation() const noexcept { return w_.size(); }
  const std::vector<double>& weights() const noexcept { return w_; }
  double hilbert_order() const noexcept { return order_; }

  double squared_norm(std::span<const double> phi) const;
  double pairing(std::span<const double> y, std::span<const double> phi) const;
  CylindricalWienerSpec prefix(std::size_t n) const;

 private:
  std::vector<double> w_;
  double order_;
};

struct LevyNoiseSpec {
  CylindricalWienerSpec wiener;
  subordinator::SubordinatorSpec subordinator;
};

struct NoiseIncrementSample {
  double t0 = 0.0, t1 = 0.0;
  double generating_dz = 0.0;
  std::vector<double> coefficients;
};

// E exp(i <Y(t), phi>_H) = exp(-t psi(|phi|_H^2 / 2)).
double char_functional(const LevyNoiseSpec& spec, std::span<const double> phi, double t);

// Increments of Y over the grid cells, exact in law given zpath.
std::vector<NoiseIncrementSample> sample_increments(const LevyNoiseSpec& spec, const subordinator::SubordinatorPath& zpath,
                                                    const TimeGrid& grid, std::uint64_t seed);

void write_increments_csv(std::ostream& os, const std::vector<NoiseIncrementSample>& cells, const ModeSet& modes);

// Law of |G|_U where G has independent N(0, w_j^{-2}) coordinates (the jump
// mark of a unit subordinator jump). Exact (scaled chi distribution) when U is
// Hilbertian with weights proportional to w; otherwise an empirical quantile
// table from a fixed-seed sample.
class MarkNormLaw {
 public:
  MarkNormLaw(const CylindricalWienerSpec& wiener, const SpaceSpec& U, std::size_t table_size = std::size_t{1} << 15,
              std::uint64_t seed = 0x5EED);

  bool exact() const noexcept { return exact_; }
  double cdf(double r) const;                      // P(|G|_U <= r)
  double survival(double r) const;                 // P(|G|_U >= r)
  double partial_moment(double p, double a) const;  // E[|G|_U^p 1{|G|_U < a}]
  double moment(double p) const;                   // E|G|_U^p
  const std::vector<double>& samples() const noexcept { return table_; }  // empty when exact
  double scale() const noexcept { return scale_; }
  double dof() const noexcept { return dof_; }

 private:
  bool exact_ = false;
  double scale_ = 1.0;   // exact case: |G|_U = scale * chi_dof
  double dof_ = 1.0;
  std::vector<double> table_;  // sorted samples
};

// Radial test functions g(|u|_U) integrated against the intensity measure nu.
struct RadialTest {
  enum class Kind { IndicatorAtLeast, Constant, PowerBelow, Custom };
  Kind kind = Kind::Constant;
  double c = 1.0;  // threshold or constant
  double p = 0.0;  // power for PowerBelow
  std::function<double(double)> g;  // Custom

  static RadialTest at_least(double c) { return {Kind::IndicatorAtLeast, c, 0.0, {}}; }
  static RadialTest constant(double c) { return {Kind::Constant, c, 0.0, {}}; }
  static RadialTest power_below(double p, double c) { return {Kind::PowerBelow, c, p, {}}; }
  static RadialTest custom(std::function<double(double)> g) { return {Kind::Custom, 0.0, 0.0, std::move(g)}; }
};

// int g(|u|_U) nu(du) with nu(du) = int zeta_s(du) rho(ds), zeta_s = law of W(s).
// Restricting the outer integral to s in [s_lo, s_hi) is supported.
double intensity_measure_functional(const LevyNoiseSpec& spec, const RadialTest& test, const SpaceSpec& U,
                                    double quad_tol = 1e-8, double s_lo = 0.0,
                                    double s_hi = std::numeric_limits<double>::infinity());

// E|W(1)|_U^2 = sum_j b_j^2 / w_j^2 for Hilbertian U (so E|W(s)|_U^2 = C s).
double fernique_constant(const CylindricalWienerSpec& wiener, const SpaceSpec& U);

struct FiniteVariationOptions {
  double horizon = 1.0;
  unsigned finest_level = 14;  // 2^finest_level cells
  unsigned fit_levels = 6;     // slope fitted over the finest levels
  double growth_slope = 0.1;
  double cutoff = 1e-8;        // for non-stable kinds
};

struct FiniteVariationVerdict {
  bool analytic_finite = false;
  double criterion_value = 0.0;  // int_0^1 E[|u| 1{|u|<1}] zeta_s rho(ds), +inf if divergent
  std::vector<double> cells;     // refinement levels
  std::vector<double> mean_variation;
  double slope = 0.0;
  bool empirical_finite = false;
  bool agree = false;
};

FiniteVariationVerdict finite_variation_test(const LevyNoiseSpec& spec, const SpaceSpec& U, std::size_t mc_paths,
                                             std::uint64_t seed, const FiniteVariationOptions& opts = {});

}  // namespace levyou::cylnoise
