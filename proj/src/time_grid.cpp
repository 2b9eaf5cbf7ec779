#include "levyou/time_grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "levyou/errors.hpp"

namespace levyou {

TimeGrid TimeGrid::uniform(double horizon, std::size_t cells) {
  if (!(horizon > 0.0) || cells == 0) throw ConfigError("TimeGrid::uniform: need horizon > 0 and cells >= 1");
  std::vector<double> p(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i) p[i] = horizon * static_cast<double>(i) / static_cast<double>(cells);
  p.back() = horizon;
  return TimeGrid(std::move(p));
}

TimeGrid TimeGrid::refined_toward(double horizon, double target, double h_min, double ratio) {
  if (!(horizon > 0.0) || !(target > 0.0) || target > horizon || !(h_min > 0.0) || !(ratio > 1.0))
    throw ConfigError("TimeGrid::refined_toward: need 0 < target <= horizon, h_min > 0, ratio > 1");
  std::vector<double> left{target};
  double h = h_min;
  double t = target;
  while (t - h > 0.5 * h) {
    t -= h;
    left.push_back(t);
    h *= ratio;
  }
  left.push_back(0.0);
  std::reverse(left.begin(), left.end());
  h = h_min;
  t = target;
  while (horizon - t > 1.5 * h) {
    t += h;
    left.push_back(t);
    h *= ratio;
  }
  if (left.back() < horizon) left.push_back(horizon);
  return TimeGrid(std::move(left));
}

TimeGrid TimeGrid::from_points(std::vector<double> points) {
  if (points.size() < 2 || points.front() != 0.0) throw ConfigError("TimeGrid: points must start at 0 and have >= 2 nodes");
  for (std::size_t i = 1; i < points.size(); ++i)
    if (!(points[i] > points[i - 1])) throw ConfigError("TimeGrid: points must be strictly increasing");
  return TimeGrid(std::move(points));
}

bool TimeGrid::is_uniform(double rel_tol) const {
  const double h = horizon() / static_cast<double>(cells());
  for (std::size_t i = 1; i < points_.size(); ++i)
    if (std::fabs(points_[i] - points_[i - 1] - h) > rel_tol * h) return false;
  return true;
}

TimeGrid TimeGrid::subsample(std::size_t factor) const {
  if (factor == 0 || cells() % factor != 0)
    throw ConfigError("TimeGrid::subsample: factor must divide the number of cells");
  std::vector<double> p;
  p.reserve(cells() / factor + 1);
  for (std::size_t i = 0; i < points_.size(); i += factor) p.push_back(points_[i]);
  return TimeGrid(std::move(p));
}

std::size_t TimeGrid::node_index(double t) const {
  auto it = std::lower_bound(points_.begin(), points_.end(), t - 1e-12 * std::max(1.0, std::fabs(t)));
  if (it == points_.end() || std::fabs(*it - t) > 1e-9 * std::max(1.0, std::fabs(t)))
    throw ConfigError("TimeGrid: time " + std::to_string(t) + " is not a grid node");
  return static_cast<std::size_t>(it - points_.begin());
}

}  // namespace levyou
