#include "levyou/sine_transform.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <tuple>

#include "levyou/errors.hpp"

namespace levyou {

namespace {

std::mutex plan_mutex;

struct PlanKey {
  int kind;
  std::vector<int> dims;
  auto operator<=>(const PlanKey&) const = default;
};

fftw_plan cached_plan(fftw_r2r_kind kind, const std::vector<int>& dims) {
  static std::map<PlanKey, fftw_plan> plans;
  std::lock_guard lock(plan_mutex);
  PlanKey key{static_cast<int>(kind), dims};
  auto it = plans.find(key);
  if (it != plans.end()) return it->second;
  std::size_t total = 1;
  for (int d : dims) total *= static_cast<std::size_t>(d);
  std::vector<double> in(total), out(total);
  std::vector<fftw_r2r_kind> kinds(dims.size(), kind);
  fftw_plan p = fftw_plan_r2r(static_cast<int>(dims.size()), dims.data(), in.data(), out.data(), kinds.data(),
                              FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!p) throw NumericError("fftw: planning failed");
  plans.emplace(std::move(key), p);
  return p;
}

std::vector<double> run(fftw_r2r_kind kind, const std::vector<int>& dims, std::span<const double> x) {
  std::vector<double> in(x.begin(), x.end()), out(in.size());
  fftw_execute_r2r(cached_plan(kind, dims), in.data(), out.data());
  return out;
}

}  // namespace

std::vector<double> dst1(std::span<const double> x) {
  if (x.empty()) return {};
  return run(FFTW_RODFT00, {static_cast<int>(x.size())}, x);
}

std::vector<double> dct1(std::span<const double> x) {
  if (x.size() < 2) throw ConfigError("dct1: need at least 2 points");
  return run(FFTW_REDFT00, {static_cast<int>(x.size())}, x);
}

std::vector<double> sine_synthesis(std::span<const double> coeffs, std::size_t M, double length) {
  if (M < 2) throw ConfigError("sine_synthesis: M must be >= 2");
  if (coeffs.size() > M - 1) throw ConfigError("sine_synthesis: more modes than interior grid points");
  std::vector<double> padded(M - 1, 0.0);
  std::copy(coeffs.begin(), coeffs.end(), padded.begin());
  const auto y = dst1(padded);
  const double s = 0.5 * std::sqrt(2.0 / length);
  std::vector<double> out(M + 1, 0.0);
  for (std::size_t m = 1; m < M; ++m) out[m] = s * y[m - 1];
  return out;
}

std::vector<double> sine_analysis(std::span<const double> interior, double length) {
  const std::size_t M = interior.size() + 1;
  auto c = dst1(interior);
  const double s = std::sqrt(0.5 * length) / static_cast<double>(M);
  for (auto& v : c) v *= s;
  return c;
}

std::vector<double> cosine_synthesis(std::span<const double> d, std::size_t M) {
  if (M < 1) throw ConfigError("cosine_synthesis: M must be >= 1");
  if (d.size() > M) throw ConfigError("cosine_synthesis: more modes than grid cells");
  std::vector<double> a(M + 1, 0.0);
  for (std::size_t k = 1; k <= d.size(); ++k) a[k] = (k == M) ? d[k - 1] : 0.5 * d[k - 1];
  return dct1(a);
}

std::vector<double> sine_synthesis_cube(std::size_t dim, std::span<const std::uint32_t> index,
                                        std::span<const double> coeffs, std::size_t M, double length) {
  if (dim == 0 || M < 2) throw ConfigError("sine_synthesis_cube: bad dimension or grid");
  if (index.size() != dim * coeffs.size()) throw ConfigError("sine_synthesis_cube: index/coefficient mismatch");
  const std::size_t n = M - 1;
  std::size_t total = 1;
  for (std::size_t i = 0; i < dim; ++i) total *= n;
  std::vector<double> dense(total, 0.0);
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    std::size_t off = 0;
    for (std::size_t i = 0; i < dim; ++i) {
      const std::uint32_t k = index[j * dim + i];
      if (k < 1 || k > n) throw ConfigError("sine_synthesis_cube: mode exceeds grid resolution");
      off = off * n + (k - 1);
    }
    dense[off] += coeffs[j];
  }
  auto y = run(FFTW_RODFT00, std::vector<int>(dim, static_cast<int>(n)), dense);
  const double s = std::pow(0.5 * std::sqrt(2.0 / length), static_cast<double>(dim));
  for (auto& v : y) v *= s;
  return y;
}

double lq_norm(std::span<const double> nodes, double length, double q) {
  if (nodes.size() < 2) throw ConfigError("lq_norm: need at least 2 nodes");
  if (!(q >= 1.0)) throw ConfigError("lq_norm: q must be >= 1");
  const std::size_t M = nodes.size() - 1;
  double s = 0.5 * (std::pow(std::fabs(nodes.front()), q) + std::pow(std::fabs(nodes.back()), q));
  for (std::size_t m = 1; m < M; ++m) s += std::pow(std::fabs(nodes[m]), q);
  return std::pow(s * length / static_cast<double>(M), 1.0 / q);
}

std::vector<double> circular_convolution(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) throw ConfigError("circular_convolution: sizes must match");
  const int n = static_cast<int>(a.size());
  const std::size_t nc = a.size() / 2 + 1;
  std::vector<double> ra(a.begin(), a.end()), rb(b.begin(), b.end()), out(a.size());
  std::vector<std::complex<double>> ca(nc), cb(nc);
  auto* fa = reinterpret_cast<fftw_complex*>(ca.data());
  auto* fb = reinterpret_cast<fftw_complex*>(cb.data());
  fftw_plan pa, pb, pinv;
  {
    std::lock_guard lock(plan_mutex);
    pa = fftw_plan_dft_r2c_1d(n, ra.data(), fa, FFTW_ESTIMATE);
    pb = fftw_plan_dft_r2c_1d(n, rb.data(), fb, FFTW_ESTIMATE);
    pinv = fftw_plan_dft_c2r_1d(n, fa, out.data(), FFTW_ESTIMATE);
  }
  if (!pa || !pb || !pinv) throw NumericError("fftw: planning failed");
  fftw_execute(pa);
  fftw_execute(pb);
  for (std::size_t k = 0; k < nc; ++k) ca[k] *= cb[k];
  fftw_execute(pinv);
  {
    std::lock_guard lock(plan_mutex);
    fftw_destroy_plan(pa);
    fftw_destroy_plan(pb);
    fftw_destroy_plan(pinv);
  }
  for (auto& v : out) v /= n;
  return out;
}

std::vector<double> periodic_synthesis(std::span<const double> amp, std::span<const double> phase, std::size_t M) {
  if (amp.size() != phase.size()) throw ConfigError("periodic_synthesis: amplitude/phase mismatch");
  if (M < 2 || amp.size() > M / 2) throw ConfigError("periodic_synthesis: need K <= M/2");
  const std::size_t nc = M / 2 + 1;
  std::vector<std::complex<double>> c(nc, 0.0);
  for (std::size_t k = 1; k <= amp.size(); ++k) {
    const bool nyquist = (M % 2 == 0) && k == M / 2;
    const double a = nyquist ? amp[k - 1] * std::cos(phase[k - 1]) : 0.5 * amp[k - 1];
    c[k] = nyquist ? std::complex<double>(a, 0.0) : std::polar(a, phase[k - 1]);
  }
  std::vector<double> out(M);
  fftw_plan p;
  {
    std::lock_guard lock(plan_mutex);
    p = fftw_plan_dft_c2r_1d(static_cast<int>(M), reinterpret_cast<fftw_complex*>(c.data()), out.data(),
                             FFTW_ESTIMATE);
  }
  if (!p) throw NumericError("fftw: planning failed");
  fftw_execute(p);
  {
    std::lock_guard lock(plan_mutex);
    fftw_destroy_plan(p);
  }
  return out;
}

}  // namespace levyou
