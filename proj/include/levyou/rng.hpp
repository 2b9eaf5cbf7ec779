#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <string_view>

namespace levyou {

// Philox4x32-10 block function (Salmon, Moraes, Dror, Shaw; SC 2011).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;
  static Counter block(Counter ctr, Key key) noexcept;
};

// Seed splitting. A stream is addressed by (master seed, stream id); the id is
// a splitmix64 hash chain over integer tags, so sub-streams never need a
// shared generator. Master seed -> Philox key, stream id -> counter words 2,3,
// draw position -> counter words 0,1.
std::uint64_t mix64(std::uint64_t x) noexcept;
std::uint64_t stream_id(std::initializer_list<std::uint64_t> parts) noexcept;
std::uint64_t tag(std::string_view name) noexcept;

class RandomStream {
 public:
  using result_type = std::uint32_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  RandomStream(std::uint64_t seed, std::uint64_t stream) noexcept;

  result_type operator()() noexcept;
  std::uint64_t next_u64() noexcept;

  double uniform() noexcept;             // open interval (0,1)
  double normal() noexcept;              // standard normal, Box-Muller
  double exponential() noexcept;         // rate 1
  std::uint64_t poisson(double mean);    // inversion below 30, PTRS above

 private:
  void refill() noexcept;

  Philox4x32::Key key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  Philox4x32::Counter buffer_{};
  int used_ = 4;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

// Random access standard normal addressed by (seed, stream, index); used where
// a draw must not depend on how many other draws were made (e.g. mode j of a
// jump mark, independent of the truncation level).
double counter_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) noexcept;

}  // namespace levyou
