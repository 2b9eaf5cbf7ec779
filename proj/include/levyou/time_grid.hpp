#pragma once

#include <cstddef>
#include <vector>

namespace levyou {

// Partition 0 = t_0 < t_1 < ... < t_n = T.
class TimeGrid {
 public:
  static TimeGrid uniform(double horizon, std::size_t cells);
  // Geometric cells shrinking toward `target` (smallest cell h_min, growth
  // factor `ratio`), coarsening again after it. `target` is a grid node.
  static TimeGrid refined_toward(double horizon, double target, double h_min, double ratio);
  static TimeGrid from_points(std::vector<double> points);

  const std::vector<double>& points() const noexcept { return points_; }
  double operator[](std::size_t i) const { return points_[i]; }
  std::size_t cells() const noexcept { return points_.size() - 1; }
  double horizon() const noexcept { return points_.back(); }
  bool is_uniform(double rel_tol = 1e-9) const;

  // Every `factor`-th node; requires cells() divisible by factor.
  TimeGrid subsample(std::size_t factor) const;
  // Index of the node equal (to rounding) to t; throws if absent.
  std::size_t node_index(double t) const;

 private:
  explicit TimeGrid(std::vector<double> p) : points_(std::move(p)) {}
  std::vector<double> points_;
};

}  // namespace levyou
