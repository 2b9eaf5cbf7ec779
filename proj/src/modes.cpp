#include "levyou/modes.hpp"

#include <algorithm>
#include <numeric>

#include "levyou/errors.hpp"

namespace levyou {

ModeSet ModeSet::cube(std::size_t dim, std::size_t per_axis, double length) {
  if (dim == 0 || per_axis == 0 || !(length > 0.0)) throw ConfigError("ModeSet: need dim >= 1, per_axis >= 1, length > 0");
  std::size_t total = 1;
  for (std::size_t i = 0; i < dim; ++i) {
    if (total > (std::size_t{1} << 34) / per_axis) throw ConfigError("ModeSet: too many modes");
    total *= per_axis;
  }
  std::vector<std::uint32_t> raw(total * dim);
  std::vector<std::uint64_t> sq(total);
  std::vector<std::uint32_t> n(dim, 1);
  for (std::size_t k = 0; k < total; ++k) {
    std::uint64_t s = 0;
    for (std::size_t i = 0; i < dim; ++i) {
      raw[k * dim + i] = n[i];
      s += static_cast<std::uint64_t>(n[i]) * n[i];
    }
    sq[k] = s;
    for (std::size_t i = dim; i-- > 0;) {  // odometer, last axis fastest => lexicographic
      if (++n[i] <= per_axis) break;
      n[i] = 1;
    }
  }
  ModeSet m;
  m.dim_ = dim;
  m.per_axis_ = per_axis;
  m.length_ = length;
  if (dim == 1) {
    m.indices_ = std::move(raw);
    m.squared_ = std::move(sq);
    return m;
  }
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sq[a] < sq[b]; });
  m.indices_.resize(total * dim);
  m.squared_.resize(total);
  for (std::size_t k = 0; k < total; ++k) {
    std::copy_n(raw.begin() + order[k] * dim, dim, m.indices_.begin() + k * dim);
    m.squared_[k] = sq[order[k]];
  }
  return m;
}

double ModeSet::laplacian_eigenvalue(std::size_t j) const {
  const double f = std::numbers::pi / length_;
  return f * f * static_cast<double>(squared_[j]);
}

ModeSet ModeSet::prefix(std::size_t n) const {
  if (n == 0 || n > size()) throw ConfigError("ModeSet::prefix: n out of range");
  ModeSet m = *this;
  m.indices_.resize(n * dim_);
  m.squared_.resize(n);
  if (dim_ == 1) m.per_axis_ = n;
  return m;
}

}  // namespace levyou
