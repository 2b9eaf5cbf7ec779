#include "levyou/space.hpp"

#include <algorithm>
#include <cmath>

#include "levyou/errors.hpp"

namespace levyou {

SpaceSpec::SpaceSpec(double q, std::vector<double> weights, SpaceRole role)
    : q_(q), weights_(std::move(weights)), role_(role) {
  if (!(q_ >= 1.0) || !std::isfinite(q_)) throw ConfigError("SpaceSpec: exponent q must be finite and >= 1");
  if (weights_.empty()) throw ConfigError("SpaceSpec: empty weight sequence");
  for (double w : weights_)
    if (!(w > 0.0) || !std::isfinite(w)) throw ConfigError("SpaceSpec: weights must be positive and finite");
}

SpaceSpec SpaceSpec::hilbert_scale(const ModeSet& modes, double order, SpaceRole role) {
  std::vector<double> w(modes.size());
  for (std::size_t j = 0; j < w.size(); ++j) w[j] = std::pow(modes.laplacian_eigenvalue(j), 0.5 * order);
  return SpaceSpec(2.0, std::move(w), role);
}

SpaceSpec SpaceSpec::power_weights(std::span<const double> values, double exponent, double q, SpaceRole role) {
  std::vector<double> w(values.size());
  for (std::size_t j = 0; j < w.size(); ++j) w[j] = std::pow(values[j], exponent);
  return SpaceSpec(q, std::move(w), role);
}

SpaceSpec SpaceSpec::unit(std::size_t n, double q, SpaceRole role) {
  return SpaceSpec(q, std::vector<double>(n, 1.0), role);
}

double SpaceSpec::norm_pow(std::span<const double> x) const {
  const std::size_t n = std::min(x.size(), weights_.size());
  double s = 0.0;
  if (q_ == 2.0) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = weights_[j] * x[j];
      s += v * v;
    }
  } else if (q_ == 1.0) {
    for (std::size_t j = 0; j < n; ++j) s += weights_[j] * std::fabs(x[j]);
  } else {
    for (std::size_t j = 0; j < n; ++j) s += std::pow(weights_[j] * std::fabs(x[j]), q_);
  }
  return s;
}

double SpaceSpec::norm(std::span<const double> x) const {
  const double s = norm_pow(x);
  if (q_ == 2.0) return std::sqrt(s);
  if (q_ == 1.0) return s;
  return std::pow(s, 1.0 / q_);
}

SpaceSpec SpaceSpec::prefix(std::size_t n) const {
  if (n == 0 || n > weights_.size()) throw ConfigError("SpaceSpec::prefix: n out of range");
  return SpaceSpec(q_, std::vector<double>(weights_.begin(), weights_.begin() + static_cast<long>(n)), role_);
}

std::string to_string(SpaceRole r) {
  switch (r) {
    case SpaceRole::E: return "E";
    case SpaceRole::U: return "U";
    case SpaceRole::H: return "H";
    case SpaceRole::F: return "F";
    default: return "other";
  }
}

}  // namespace levyou
