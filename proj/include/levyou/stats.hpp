#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "levyou/parallel.hpp"
#include "levyou/rng.hpp"

namespace levyou {

struct MeanStat {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
};

// Welford accumulator; merge() is used for ordered reduction of chunks.
class RunningStat {
 public:
  void add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }
  void merge(const RunningStat& o) {
    if (o.n_ == 0) return;
    const double n = static_cast<double>(n_ + o.n_);
    const double d = o.mean_ - mean_;
    mean_ += d * static_cast<double>(o.n_) / n;
    m2_ += o.m2_ + d * d * static_cast<double>(n_) * static_cast<double>(o.n_) / n;
    n_ += o.n_;
  }
  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double stderr_of_mean() const { return n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0; }
  MeanStat stat() const { return {mean_, stderr_of_mean(), n_}; }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Mean of draw(rng) over n draws, split into fixed chunks with their own
// streams so the result does not depend on the thread count.
template <class Draw>
MeanStat mc_mean(std::size_t n, std::uint64_t seed, std::uint64_t stream_tag, Draw&& draw, std::size_t chunks = 64) {
  chunks = std::max<std::size_t>(1, std::min(chunks, n));
  std::vector<RunningStat> part(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    RandomStream rng(seed, stream_id({stream_tag, c}));
    const std::size_t lo = n * c / chunks, hi = n * (c + 1) / chunks;
    for (std::size_t i = lo; i < hi; ++i) part[c].add(draw(rng));
  });
  RunningStat all;
  for (const auto& p : part) all.merge(p);
  return all.stat();
}

// k means from the same draws: draw(rng, out) fills out[0..k).
template <class Draw>
std::vector<MeanStat> mc_means(std::size_t n, std::size_t k, std::uint64_t seed, std::uint64_t stream_tag, Draw&& draw,
                               std::size_t chunks = 64) {
  chunks = std::max<std::size_t>(1, std::min(chunks, n));
  std::vector<std::vector<RunningStat>> part(chunks, std::vector<RunningStat>(k));
  parallel_for(chunks, [&](std::size_t c) {
    RandomStream rng(seed, stream_id({stream_tag, c}));
    std::vector<double> out(k);
    const std::size_t lo = n * c / chunks, hi = n * (c + 1) / chunks;
    for (std::size_t i = lo; i < hi; ++i) {
      draw(rng, std::span<double>(out));
      for (std::size_t j = 0; j < k; ++j) part[c][j].add(out[j]);
    }
  });
  std::vector<MeanStat> res(k);
  for (std::size_t j = 0; j < k; ++j) {
    RunningStat all;
    for (const auto& p : part) all.merge(p[j]);
    res[j] = all.stat();
  }
  return res;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Kolmogorov-Smirnov distance between integer samples and Poisson(mean).
double ks_poisson(const std::vector<std::uint64_t>& counts, double mean);
// Asymptotic KS critical value at level 0.01 (conservative for discrete laws).
inline double ks_critical_001(std::size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

}  // namespace levyou
