#pragma once

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

namespace levyou {

// Dirichlet sine modes on (0,L)^d. Multi-indices n in {1..N}^d, enumerated by
// |n|^2 then lexicographically. Eigenfunction of mode n:
//   (2/L)^{d/2} prod_i sin(n_i pi x_i / L),  -Laplacian eigenvalue (pi/L)^2 |n|^2.
class ModeSet {
 public:
  static ModeSet cube(std::size_t dim, std::size_t per_axis, double length = std::numbers::pi);
  static ModeSet line(std::size_t count, double length = std::numbers::pi) { return cube(1, count, length); }

  std::size_t size() const noexcept { return squared_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t per_axis() const noexcept { return per_axis_; }
  double length() const noexcept { return length_; }

  std::span<const std::uint32_t> multi_index(std::size_t j) const {
    return {indices_.data() + j * dim_, dim_};
  }
  std::uint64_t squared_norm(std::size_t j) const { return squared_[j]; }
  double laplacian_eigenvalue(std::size_t j) const;  // mu_j = (pi/L)^2 |n|^2

  // First n modes of the enumeration (for d = 1 exactly modes 1..n).
  ModeSet prefix(std::size_t n) const;

 private:
  std::size_t dim_ = 1;
  std::size_t per_axis_ = 0;
  double length_ = std::numbers::pi;
  std::vector<std::uint32_t> indices_;
  std::vector<std::uint64_t> squared_;
};

}  // namespace levyou
