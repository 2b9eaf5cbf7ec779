#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "levyou/cylnoise.hpp"
#include "levyou/modes.hpp"
#include "levyou/space.hpp"
#include "levyou/stats.hpp"
#include "levyou/subordinator.hpp"
#include "levyou/time_grid.hpp"

namespace levyou::spectral_ou {

// Diagonal generator A = -(-Laplacian)^gamma on Dirichlet sine modes:
// A e_j = -lambda_j e_j, lambda_j = mu_j^gamma. A user-supplied increasing
// positive sequence is also accepted (no mode geometry attached).
class SpectralOperator {
 public:
  static SpectralOperator fractional_laplacian(ModeSet modes, double gamma);
  static SpectralOperator cube(std::size_t dim, std::size_t per_axis, double gamma,
                               double length = std::numbers::pi);
  static SpectralOperator from_eigenvalues(std::vector<double> lambda);

  std::size_t size() const noexcept { return lambda_.size(); }
  std::size_t dim() const noexcept { return modes_ ? modes_->dim() : 1; }
  double gamma() const noexcept { return gamma_; }
  const std::vector<double>& eigenvalues() const noexcept { return lambda_; }
  double eigenvalue(std::size_t j) const { return lambda_[j]; }
  // null for user-supplied sequences
  const std::shared_ptr<const ModeSet>& modes() const noexcept { return modes_; }
  SpectralOperator prefix(std::size_t n) const;

 private:
  SpectralOperator(std::vector<double> lambda, double gamma, std::shared_ptr<const ModeSet> modes);
  std::vector<double> lambda_;
  double gamma_ = 0.0;
  std::shared_ptr<const ModeSet> modes_;
};

struct FieldSample {
  double time = 0.0;
  std::vector<double> coefficients;
  std::shared_ptr<const ModeSet> modes;

  // values on the interior nodes of the M-grid of the domain (d = 1: M + 1
  // nodes including the two zero endpoints)
  std::vector<double> physical(std::size_t M) const;
};

void write_field_csv(std::ostream& os, const FieldSample& x);

// ---------------------------------------------------------------- operator norms

struct SemigroupNorm {
  double value = 0.0;                // sup_n e^{-lambda_n t} b_n a_n^{r/q}
  std::size_t maximizer = 0;         // first index attaining the sup
  bool power_law = false;            // weights detected as powers of lambda
  double exponent = 0.0;             // kappa = beta + (r/q) alpha (power_law only)
  double envelope = 0.0;             // c* t^{-kappa} (power_law only)
};

// U = l^r_{a^{-1}} (SpaceSpec weights a_n^{-1}), E = l^q_b. Power-law weights
// are located analytically near lambda* = kappa / t; otherwise all modes are scanned.
// The displayed expression is used as is; it is the operator norm only for r = q.
SemigroupNorm semigroup_norm(const SpectralOperator& op, const SpaceSpec& U, const SpaceSpec& E, double t);

struct SlopeCheck {
  double slope = 0.0;
  double expected = 0.0;  // -kappa
  double tolerance = 0.05;
  bool pass = false;
  std::vector<double> times, values;
};

SlopeCheck check_semigroup_slope(const SpectralOperator& op, const SpaceSpec& U, const SpaceSpec& E,
                                 double t_lo = 1e-6, double t_hi = 1.0, std::size_t points = 31,
                                 double tolerance = 0.05);

// Power law w_j = lambda_j^e fitted exactly (up to rel_tol); nullopt otherwise.
std::optional<double> power_exponent(std::span<const double> weights, std::span<const double> lambda,
                                     double rel_tol = 1e-9);

struct RadonifyingVerdict {
  bool radonifying = false;
  bool analytic = false;       // decided by the p-series exponent
  double series_exponent = 0;  // s in sum j^{-s}
  double partial_sum = 0.0;    // sum over retained modes of a_j^{-r}
  double tail_bound = 0.0;     // +inf when divergent
};

// Sum_j a_j^{-r} < infinity with a_j = lambda_j^alpha. With mode geometry the
// p-series exponent is r alpha 2 gamma / d (exact boundary: divergent);
// for user sequences the growth of lambda_j is fitted on the last half of
// the retained modes and |s - 1| <= 1e-3 is treated as divergent.
RadonifyingVerdict check_radonifying(const SpectralOperator& op, double r, double alpha);
// Same with U given by its weights a_j^{-1}; alpha is recovered by power_exponent.
RadonifyingVerdict check_radonifying(const SpaceSpec& U, const SpectralOperator& op);

struct RadonifyingExponents {
  double r = 2.0;
  double alpha = 0.0;
};
// For p < (2 gamma / d) ^ 1: r = 2 and alpha with r alpha (2 gamma / d) > 1 and r alpha < 1/p.
RadonifyingExponents choose_radonifying_exponents(double p, double gamma, std::size_t dim);

// ---------------------------------------------------------------- sampling

// V_j = int_0^t e^{-2 lambda_j (t-s)} dZ(s), closed form over the path.
std::vector<double> convolution_variance(const SpectralOperator& op, const subordinator::SubordinatorPath& zpath,
                                         double t);

// X(t) = int_0^t e^{(t-s)A} dY(s); mode j ~ N(0, V_j / w_j^2) given zpath.
FieldSample sample_convolution(const SpectralOperator& op, const cylnoise::LevyNoiseSpec& noise,
                               const subordinator::SubordinatorPath& zpath, double t, std::uint64_t seed);

// Moments over one cell of length h of the drift part (slope c) of
// A = int e^{-lambda (t1-s)} dW(Z(s)) and B = int (1 - e^{-lambda (t1-s)}) / lambda dW(Z(s)).
struct CellMoments {
  double var_a = 0.0, var_b = 0.0, cov = 0.0;
};
CellMoments drift_cell_moments(double lambda, double h, double slope);

// X on the nodes of a grid together with the cell integrals int_{t_k}^{t_{k+1}} X dt,
// jointly exact in law given zpath. Draws are keyed by (cell, mode), so a
// smaller truncation sees the same coefficients in its modes.
struct Trajectory {
  TimeGrid grid = TimeGrid::uniform(1.0, 1);
  std::shared_ptr<const ModeSet> modes;
  std::vector<std::vector<double>> states;          // per node
  std::vector<std::vector<double>> cell_integrals;  // per cell
  FieldSample at(std::size_t node) const { return {grid[node], states[node], modes}; }
};

Trajectory sample_trajectory(const SpectralOperator& op, const cylnoise::LevyNoiseSpec& noise,
                             const subordinator::SubordinatorPath& zpath, const TimeGrid& grid, std::uint64_t seed,
                             std::span<const double> x0 = {});

// E exp(i <X(t), phi>_H) = exp(-int_0^t psi(|S(s) phi|_H^2 / 2) ds).
double charfn_oracle(const SpectralOperator& op, const cylnoise::LevyNoiseSpec& noise, std::span<const double> phi,
                     double t, double quad_tol = 1e-10);

// Empirical E exp(i <X(t), phi>_H) (real part; the law is symmetric).
MeanStat empirical_charfn(const SpectralOperator& op, const cylnoise::LevyNoiseSpec& noise,
                          std::span<const double> phi, double t, std::size_t paths, std::uint64_t seed,
                          double cutoff = 1e-4);

// ---------------------------------------------------------------- regularity bound

struct RegularityTarget {
  enum class Kind { Holder, Sobolev };
  Kind kind = Kind::Holder;
  double value = 0.0;  // delta, or Sobolev order r
  double q = 2.0;      // integrability of the Sobolev target
  static RegularityTarget holder(double delta) { return {Kind::Holder, delta, 2.0}; }
  static RegularityTarget sobolev(double r, double q = 2.0) { return {Kind::Sobolev, r, q}; }
};

struct RegularityBound {
  double critical = 0.0;  // delta*
  double p = 0.0;         // alpha v 1 for stable noise, else the Sub(p) exponent in use
  bool admissible = false;
  bool empty = false;     // delta* <= 0
};

// delta* = g / (alpha v 1) - d/2 (Stable(alpha/2)), g / p - d/2 (Sub(p), p in (1,2]),
// g - d/2 (p <= 1), with smoothing order g = 2 gamma. A drift of Z is a
// Gaussian component and forces p = 2. A Sobolev target r (integrability q)
// is admissible iff r - d/q < delta*.
RegularityBound regularity_exponent_bound(const SpectralOperator& op, const cylnoise::LevyNoiseSpec& noise,
                                          const RegularityTarget& target, std::optional<double> sub_p = std::nullopt);

}  // namespace levyou::spectral_ou
