#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "levyou/cylnoise.hpp"
#include "levyou/spectral_ou.hpp"

namespace levyou::regularity {

// ---------------------------------------------------------------- Holder exponent

struct HolderEstimate {
  double delta = 0.0;
  double stderr_ = 0.0;
  double ci_lo = 0.0, ci_hi = 0.0;  // delta -/+ 1.96 stderr
  std::vector<double> scales;       // h = step * L / M
  std::vector<double> increments;   // max_m |f(x_m + h) - f(x_m)|
};

// Slope of log max-increment against log scale for dyadic steps
// min_step, 2 min_step, ..., max_step (max_step = 0: M / 8). Values on the
// M + 1 nodes of [0, L].
HolderEstimate estimate_holder_grid(std::span<const double> values, double length, std::size_t min_step = 1,
                                    std::size_t max_step = 0);

// Synthesizes the field on the M-grid (d = 1, M a power of 2) and uses steps
// from one wavelength of the highest retained mode upward.
HolderEstimate estimate_holder(const spectral_ou::FieldSample& sample, std::size_t M);

// ---------------------------------------------------------------- jump parts of X

enum class JumpPart { Small, Large, All };

// X restricted to part of the noise: X1 uses the continuous part of Y and
// jumps with |u|_U < threshold, X2 the jumps with |u|_U >= threshold.
// Marks are those of jumpdecomp::sample_noise_path (truncation consistent);
// the size of a mark is measured in U on all modes of `noise`.
spectral_ou::Trajectory part_trajectory(const spectral_ou::SpectralOperator& op, const cylnoise::LevyNoiseSpec& noise,
                                        const subordinator::SubordinatorPath& zpath, const TimeGrid& grid,
                                        std::uint64_t seed, const SpaceSpec& U, JumpPart part,
                                        double threshold = 1.0);

// ---------------------------------------------------------------- time integrability

using FieldNorm = std::function<double(std::span<const double>)>;

// Left Riemann sum of |X(t)|^p over the nodes 0, stride, 2 stride, ...
double time_integral(const spectral_ou::Trajectory& x, const FieldNorm& norm, double p, std::size_t stride = 1);

struct IntegrabilityReport {
  std::vector<std::size_t> cells;                // per level, coarse to fine
  std::vector<std::vector<double>> integrals;    // [level][path]
  std::vector<double> mean;                      // per level
  std::vector<double> last_change;               // per path, relative change on the last halving
  double max_change = 0.0;
  double tolerance = 0.05;
  bool stabilized = false;
};

// Riemann sums on the trajectory grid and `levels - 1` successive coarsenings by 2.
IntegrabilityReport time_integrability(const std::vector<spectral_ou::Trajectory>& paths, const FieldNorm& norm,
                                       double p, std::size_t levels, double tolerance = 0.05);

struct ScalingReport {
  std::vector<double> horizons, means, stderrs;
  double exponent = 0.0;         // fitted log-log slope of the ensemble mean
  double expected = 0.0;         // 2 - theta p
  double tolerance = 0.15;
  std::vector<double> doubling_ratio;  // mean(2T) / mean(T)
  bool ratios_ok = false;        // ratio <= 2^{expected} (1 + band)
  bool pass = false;
};

struct ScalingOptions {
  std::vector<double> horizons{0.01, 0.02, 0.04, 0.08};
  std::size_t paths = 400;
  std::size_t cells = 64;
  double cutoff = 1e-5;
  double threshold = 1.0;
  double band = 0.15;
  double tolerance = 0.15;
};

// E int_0^T |X1(t)|_E^p dt across horizons; theta is the semigroup exponent
// of |S(r)|_{L(U,E)} <= C r^{-theta}.
ScalingReport x1_time_scaling(const spectral_ou::SpectralOperator& op, const cylnoise::LevyNoiseSpec& noise,
                              const SpaceSpec& U, const SpaceSpec& E, double p, double theta,
                              const ScalingOptions& opts, std::uint64_t seed);

// ---------------------------------------------------------------- blow-up probe

struct BlowupOptions {
  double horizon = 1.0;
  double window = 0.1;       // fraction of the horizon after tau_1
  double threshold = 1.0;
  std::size_t time_points = 24;
  double cutoff = 1e-4;
  double growth_slope = 0.1;
  double u_ratio = 2.0;
};

struct BlowupReport {
  bool conclusive = false;   // a large jump occurred
  double tau1 = 0.0;
  double jump_size = 0.0;    // |u|_U of the first large jump
  std::vector<std::size_t> truncations;
  std::vector<double> sup_f, sup_u;  // sup over (tau1, tau1 + h] of |X2|_F and |X2|_U
  std::vector<double> weight_ratio_sum;  // sum_{j<N} (F_j / w_j)^2
  double slope = 0.0;        // log sup_f against log N
  double u_spread = 0.0;     // max sup_u / min sup_u
  bool growth = false;
  bool u_bounded = false;
  bool success = false;
};

// `noise` and F, U cover the largest truncation; smaller ones are prefixes.
BlowupReport blowup_probe(const spectral_ou::SpectralOperator& op, const cylnoise::LevyNoiseSpec& noise,
                          const SpaceSpec& F, const SpaceSpec& U, const std::vector<std::size_t>& truncations,
                          std::uint64_t seed, const BlowupOptions& opts = {});

// ---------------------------------------------------------------- circle experiment

// Profile on the M + 1 nodes 2 pi m / M (first = last) and the increments of
// the scalar driving path over the M cells of [0, 2 pi].
struct CirclePath {
  std::vector<double> profile;
  std::vector<double> increments;
};

// X(z_m) = int_0^{2 pi} f(z_m - s) dY(s) with dY lumped at the left cell ends.
std::vector<double> circle_convolution(const CirclePath& path);

// Random-phase profile f = sum_{k=1}^{M/2} k^{-(theta + 1/2)} cos(k z + phi_k).
std::vector<double> rough_profile(double theta, std::size_t M, std::uint64_t seed);

// Increments of Y = W(Z) over M uniform cells of [0, 2 pi] (Z sampled exactly on the nodes).
std::vector<double> scalar_increments(const subordinator::SubordinatorSpec& sub, std::size_t M, std::uint64_t seed);

struct CircleSweepRow {
  double theta = 0.0;
  std::vector<double> sups;  // per grid
  double slope = 0.0;        // log sup against log M
  bool growth = false;
};
struct CircleSweep {
  std::vector<std::size_t> grids;
  std::vector<CircleSweepRow> rows;
};

// One driving path on the finest grid, summed to the coarser ones; for each
// theta the profile is refined with the grid (same phases).
CircleSweep circle_sweep(const subordinator::SubordinatorSpec& sub, const std::vector<double>& thetas,
                         const std::vector<std::size_t>& grids, std::uint64_t seed, double growth_slope = 0.1);

}  // namespace levyou::regularity
