#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace levyou {

// Unnormalized FFTW transforms (plans cached, thread-safe execution).
//   dst1: Y_k = 2 sum_j x_j sin(pi (j+1)(k+1) / (n+1))
//   dct1: Y_k = x_0 + (-1)^k x_{n-1} + 2 sum_{j=1}^{n-2} x_j cos(pi j k / (n-1))
std::vector<double> dst1(std::span<const double> x);
std::vector<double> dct1(std::span<const double> x);

// f(x_m) = sum_{n=1}^{N} c_n sqrt(2/L) sin(n pi x_m / L) at x_m = m L / M,
// m = 0..M (endpoints are zero). Requires N <= M - 1 (extra modes are an error).
std::vector<double> sine_synthesis(std::span<const double> coeffs, std::size_t M, double length);
// Inverse of sine_synthesis on the M - 1 interior values: returns c_1..c_{M-1}.
std::vector<double> sine_analysis(std::span<const double> interior, double length);
// g(x_m) = sum_n d_n cos(n pi x_m / L), m = 0..M, n = 1..N with N <= M.
std::vector<double> cosine_synthesis(std::span<const double> d, std::size_t M);

// d-dimensional synthesis on the (M-1)^d interior nodes of (0,L)^d, row-major
// with the last axis fastest. `index` holds d entries per coefficient.
std::vector<double> sine_synthesis_cube(std::size_t dim, std::span<const std::uint32_t> index,
                                        std::span<const double> coeffs, std::size_t M, double length);

// (int_0^L |f|^q dx)^{1/q} by the trapezoid rule on the M + 1 nodes m L / M.
double lq_norm(std::span<const double> nodes, double length, double q);

// f(z_m) = sum_{k=1}^{K} amp_k cos(k z_m + phase_k), z_m = 2 pi m / M, m = 0..M-1; K <= M/2.
std::vector<double> periodic_synthesis(std::span<const double> amp, std::span<const double> phase, std::size_t M);

// c_m = sum_k a_{(m - k) mod n} b_k, via a real FFT.
std::vector<double> circular_convolution(std::span<const double> a, std::span<const double> b);

}  // namespace levyou
