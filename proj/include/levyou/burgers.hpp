#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "levyou/cylnoise.hpp"
#include "levyou/spectral_ou.hpp"

namespace levyou::burgers {

// Fields on (0,1) are stored by their coefficients in the orthonormal basis
// e_k = sqrt(2) sin(k pi x), k = 1..K, so |v|_{L^2} is the Euclidean norm.
// A = -d^2/dx^2 (Dirichlet) has eigenvalues (k pi)^2 and B(u,v) = (uv)_x / 2.

// Writes the first out.size() coefficients of a field at time t.
using SpectralField = std::function<void(double t, std::span<double> out)>;

SpectralField zero_field();

struct BurgersState {
  double time = 0.0;
  std::vector<double> coefficients;
  // M + 1 nodal values on x_m = m / M (endpoints zero)
  std::vector<double> physical(std::size_t M) const;
};

struct Discretization {
  double horizon = 1.0;
  double dt = 1e-3;
  std::size_t M = 64;  // grid cells; M - 1 sine modes
};

// Per-node diagnostics; time integrals over [t_n, t_{n+1}) use the node
// values, which is exact for the frozen-coefficient scheme.
struct BurgersTrajectory {
  Discretization disc;
  std::vector<std::vector<double>> states;
  std::vector<double> energy;     // |v|^2
  std::vector<double> dirichlet;  // |v_x|^2
  std::vector<double> l4;         // |v|_{L^4}^4
  std::vector<double> rate_dual;  // |v'|_{V'}^2 from the equation
  std::vector<double> z_l4;       // |z|_{L^4}^4
  std::vector<double> g_dual;     // |g|_{V'}^2

  std::size_t steps() const noexcept { return states.size() - 1; }
  double time(std::size_t n) const noexcept { return disc.dt * static_cast<double>(n); }
  BurgersState at(std::size_t n) const { return {time(n), states[n]}; }
};

// dv/dt + Av + B(v,z) + B(z,v) + B(v,v) = g with exact diffusion per mode
// (exponential Euler) and dealiased pseudo-spectral products. Throws
// StepSizeError when |v|^2 exceeds 10x the running a priori bound.
BurgersTrajectory solve_modified_burgers(std::span<const double> v0, const SpectralField& z, const SpectralField& g,
                                         const Discretization& disc);

struct AprioriConstants {
  double K = 1.0, L = 0.0, M = 0.0, N = 0.0;
};
AprioriConstants apriori_constants(double v0_sq, double z_l4_integral, double g_dual_integral, double horizon);

struct BoundCheck {
  std::string name;
  double lhs = 0.0, rhs = 0.0;
  bool holds = false;
};

struct AprioriReport {
  AprioriConstants constants;
  std::vector<BoundCheck> checks;  // energy, dissipation, time derivative, L^4
  double slack = 0.05;
  bool all_hold = false;
};
AprioriReport check_apriori(const BurgersTrajectory& traj, double slack = 0.05);

// ---------------------------------------------------------------- stochastic equation

struct StochasticOptions {
  double cutoff = 1e-4;            // subordinator small-jump cutoff
  bool allow_l2_noise = false;     // permit H = L^2 (no existence claim)
  // int |Y_A|_L4^4 growing by more than (1 + tol) on each of two halvings counts
  // as divergence; a single large jump can move one level by ~50%
  double shift_l4_tolerance = 1.0;
};

struct StochasticBurgersResult {
  BurgersTrajectory v;                       // u - Y_A
  spectral_ou::Trajectory shift;             // Y_A on the finest time grid
  std::size_t stride = 1;                    // shift nodes per solver step
  std::vector<std::vector<double>> u;        // v + Y_A per solver node
  double sup_energy = 0.0;                   // sup_t |u|^2
  double l4_integral = 0.0;                  // int_0^T |u|_{L^4}^4
  double shift_l4_integral = 0.0;
  std::vector<double> shift_l4_levels;       // on the grid, every 2nd and every 4th node
};

// Samples Y_A for du + [Au + B(u)]dt = f dt + dY on (0,1) and solves for
// v = u - Y_A pathwise with z = Y_A and g = f - B(Y_A).
StochasticBurgersResult solve_stochastic_burgers(std::span<const double> u0, const cylnoise::LevyNoiseSpec& noise,
                                                 const SpectralField& f, const Discretization& disc, std::uint64_t seed,
                                                 const StochasticOptions& opts = {});

// Same with a given Y_A sampled on a uniform grid whose step is disc.dt / stride.
StochasticBurgersResult solve_with_shift(std::span<const double> u0, const spectral_ou::Trajectory& shift,
                                         std::size_t stride, const SpectralField& f, const Discretization& disc,
                                         const StochasticOptions& opts = {});

// Residual of the weak formulation tested against psi = sin(k pi x), maximized
// over the solver nodes.
struct WeakResidual {
  std::vector<int> k;
  std::vector<double> max_abs;
  double worst = 0.0;
};
WeakResidual weak_form_residual(const StochasticBurgersResult& r, std::span<const double> u0, const SpectralField& f,
                                const std::vector<int>& k);

// Pathwise convergence: the same Y_A solved at (2 dt, M) and (dt, 2M);
// gap = sup over common nodes of |u_coarse - u_fine| / sup |u_fine|.
struct CauchyReport {
  double gap = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};
CauchyReport cauchy_refinement(std::span<const double> u0, const cylnoise::LevyNoiseSpec& noise, const SpectralField& f,
                               const Discretization& coarse, std::uint64_t seed, double tolerance,
                               const StochasticOptions& opts = {});

void write_trajectory_csv(std::ostream& os, const std::vector<std::vector<double>>& states, double dt,
                          std::size_t M, std::size_t every = 1);

}  // namespace levyou::burgers
