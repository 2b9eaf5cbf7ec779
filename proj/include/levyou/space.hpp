#pragma once

#include <span>
#include <string>
#include <vector>

#include "levyou/modes.hpp"

namespace levyou {

enum class SpaceRole { E, U, H, F, Other };

// Diagonal sequence space l^q_b with norm (sum_j b_j^q |x_j|^q)^{1/q},
// evaluated on the first min(len(x), len(b)) coordinates.
class SpaceSpec {
 public:
  SpaceSpec(double q, std::vector<double> weights, SpaceRole role = SpaceRole::Other);

  // |x|^2 = sum mu_j^order x_j^2, mu_j = (pi/L)^2 |n|^2 (Hilbert scale H^{order,2}).
  static SpaceSpec hilbert_scale(const ModeSet& modes, double order, SpaceRole role = SpaceRole::Other);
  // weights b_j = values_j^exponent.
  static SpaceSpec power_weights(std::span<const double> values, double exponent, double q,
                                 SpaceRole role = SpaceRole::Other);
  static SpaceSpec unit(std::size_t n, double q = 2.0, SpaceRole role = SpaceRole::Other);

  double q() const noexcept { return q_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return weights_.size(); }
  SpaceRole role() const noexcept { return role_; }

  double norm(std::span<const double> x) const;
  double norm_pow(std::span<const double> x) const;  // |x|^q
  SpaceSpec prefix(std::size_t n) const;

 private:
  double q_;
  std::vector<double> weights_;
  SpaceRole role_;
};

std::string to_string(SpaceRole r);

}  // namespace levyou
