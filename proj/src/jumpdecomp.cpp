#include "levyou/jumpdecomp.hpp"

#include <algorithm>
#include <cmath>

#include "levyou/errors.hpp"
#include "levyou/rng.hpp"
#include "levyou/stats.hpp"

namespace levyou::jumpdecomp {

using cylnoise::LevyNoiseSpec;
using subordinator::SubordinatorPath;

std::vector<double> NoisePath::value(std::size_t node) const {
  std::vector<double> y(modes, 0.0);
  for (std::size_t c = 0; c < node && c < continuous.size(); ++c)
    for (std::size_t j = 0; j < modes; ++j) y[j] += continuous[c][j];
  const double t = grid[node];
  for (const auto& jmp : jumps) {
    if (jmp.time > t) break;
    for (std::size_t j = 0; j < modes; ++j) y[j] += jmp.mark[j];
  }
  return y;
}

double jump_mark(std::uint64_t seed, std::size_t jump_index, std::size_t mode, double delta_z, double weight) {
  return std::sqrt(delta_z) / weight * counter_normal(seed, stream_id({tag("jump-mark"), jump_index}), mode);
}

NoisePath sample_noise_path(const LevyNoiseSpec& spec, const SubordinatorPath& zpath, const TimeGrid& grid,
                            std::uint64_t seed) {
  if (grid.horizon() > zpath.horizon * (1.0 + 1e-12))
    throw ConfigError("sample_noise_path: grid extends beyond the subordinator path horizon");
  const auto& w = spec.wiener.weights();
  NoisePath out;
  out.grid = grid;
  out.modes = w.size();
  out.continuous.assign(grid.cells(), std::vector<double>(w.size(), 0.0));
  const double slope = zpath.slope();
  if (slope > 0.0) {
    RandomStream rng(seed, stream_id({tag("noise-continuous")}));
    for (std::size_t c = 0; c < grid.cells(); ++c) {
      const double sd = std::sqrt(slope * (grid[c + 1] - grid[c]));
      for (std::size_t j = 0; j < w.size(); ++j) out.continuous[c][j] = sd / w[j] * rng.normal();
    }
  }
  for (std::size_t k = 0; k < zpath.jumps.size(); ++k) {
    const auto& zj = zpath.jumps[k];
    if (zj.time > grid.horizon()) break;
    MarkedJump mj;
    mj.time = zj.time;
    mj.delta_z = zj.size;
    mj.mark.resize(w.size());
    for (std::size_t j = 0; j < w.size(); ++j) mj.mark[j] = jump_mark(seed, k, j, zj.size, w[j]);
    out.jumps.push_back(std::move(mj));
  }
  return out;
}

SplitPaths split(const NoisePath& path, const SpaceSpec& U, double threshold) {
  if (!(threshold > 0.0)) throw ConfigError("split: threshold must be positive");
  SplitPaths out;
  out.small.grid = path.grid;
  out.small.modes = path.modes;
  out.small.continuous = path.continuous;
  out.large.threshold = threshold;
  for (const auto& j : path.jumps) {
    MarkedJump c = j;
    c.size = U.norm(c.mark);
    if (c.size >= threshold)
      out.large.jumps.push_back(std::move(c));
    else
      out.small.jumps.push_back(std::move(c));
  }
  return out;
}

std::vector<double> large_value(const MarkedJumpList& y2, double t, std::size_t modes) {
  std::vector<double> y(modes, 0.0);
  for (const auto& j : y2.jumps) {
    if (j.time > t) break;
    for (std::size_t m = 0; m < modes && m < j.mark.size(); ++m) y[m] += j.mark[m];
  }
  return y;
}

std::vector<double> integrate_large(const DiagonalIntegrand& psi, const MarkedJumpList& y2, double t,
                                    std::size_t modes) {
  std::vector<double> out(modes, 0.0), d(modes);
  for (const auto& j : y2.jumps) {
    if (j.time > t) break;
    psi(j.time, d);
    for (std::size_t m = 0; m < modes && m < j.mark.size(); ++m) out[m] += d[m] * j.mark[m];
  }
  return out;
}

CompensatedIntegral integrate_small_compensated(const DiagonalIntegrand& psi, const NoisePath& y1,
                                                const LevyNoiseSpec& spec, const SpaceSpec& U, double t,
                                                double threshold) {
  const std::size_t n = y1.modes;
  CompensatedIntegral r;
  r.jump_part.assign(n, 0.0);
  r.gaussian_part.assign(n, 0.0);
  r.compensator.assign(n, 0.0);
  std::vector<double> d(n);
  double scale = 0.0;
  for (const auto& j : y1.jumps) {
    if (j.time > t) break;
    psi(j.time, d);
    double s = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      const double v = d[m] * j.mark[m];
      r.jump_part[m] += v;
      s += v * v;
    }
    scale += std::sqrt(s);
  }
  for (std::size_t c = 0; c < y1.grid.cells() && y1.grid[c + 1] <= t * (1.0 + 1e-12); ++c) {
    psi(y1.grid[c], d);
    for (std::size_t m = 0; m < n; ++m) r.gaussian_part[m] += d[m] * y1.continuous[c][m];
  }

  // Compensator: int_0^t Psi(s) ds (componentwise) times the mean small mark
  // int_{|u|<1} u nu(du) = int rho(ds) E[sqrt(s) G 1{sqrt(s)|G|_U < 1}],
  // with E over a fixed antithetic sample {G, -G}.
  const auto& w = spec.wiener.weights();
  const std::size_t pairs = 256;
  RandomStream rng(0xC0FFEE, stream_id({tag("compensator")}));
  std::vector<std::vector<double>> g(pairs, std::vector<double>(n));
  std::vector<double> gnorm(pairs);
  for (std::size_t i = 0; i < pairs; ++i) {
    for (std::size_t m = 0; m < n; ++m) g[i][m] = rng.normal() / w[m];
    gnorm[i] = U.norm(g[i]);
  }
  std::vector<double> mean_mark(n, 0.0);
  for (std::size_t m = 0; m < n; ++m) {
    mean_mark[m] = spec.subordinator.intensity().integrate(
        [&](double s) {
          const double rs = std::sqrt(s);
          double acc = 0.0;
          for (std::size_t i = 0; i < pairs; ++i) {
            if (rs * gnorm[i] >= threshold) continue;
            const double plus = rs * g[i][m];
            acc += plus + (-plus);
          }
          return acc / (2.0 * static_cast<double>(pairs));
        },
        1e-6);
  }
  // int_0^t Psi(s) ds by the midpoint rule on 64 cells (only multiplies the mean mark)
  std::vector<double> psi_int(n, 0.0);
  const int cells = 64;
  for (int c = 0; c < cells; ++c) {
    psi(t * (c + 0.5) / cells, d);
    for (std::size_t m = 0; m < n; ++m) psi_int[m] += d[m] * t / cells;
  }
  double cn = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    r.compensator[m] = psi_int[m] * mean_mark[m];
    cn += r.compensator[m] * r.compensator[m];
  }
  r.compensator_norm = std::sqrt(cn);
  r.term_scale = scale;
  if (r.compensator_norm > 1e-12 * std::max(scale, 1.0))
    throw NumericError("integrate_small_compensated: compensator does not vanish");
  for (std::size_t m = 0; m < n; ++m) r.jump_part[m] -= r.compensator[m];
  return r;
}

// ---------------------------------------------------------------- moment inequalities

namespace {

void validate_step(const StepIntegrand& f, const SpaceSpec& E) {
  if (f.pieces.empty()) throw ConfigError("step integrand: no pieces");
  const std::size_t n = f.pieces.front().value.size();
  for (const auto& p : f.pieces) {
    if (p.value.size() != n) throw ConfigError("step integrand: pieces must have equal dimension");
    if (!(p.measure >= 0.0) || !std::isfinite(p.measure)) throw ConfigError("step integrand: measures must be finite");
  }
  if (E.size() < n) throw ConfigError("step integrand: space E has fewer coordinates than the integrand");
}

double rhs_sum(const StepIntegrand& f, double p, const SpaceSpec& E) {
  double s = 0.0;
  for (const auto& piece : f.pieces) s += std::pow(E.norm(piece.value), p) * piece.measure;
  return s;
}

MeanStat poisson_moment(const StepIntegrand& f, double p, const SpaceSpec& E, std::size_t mc, std::uint64_t seed,
                        bool compensated, std::uint64_t stream_tag) {
  const std::size_t n = f.pieces.front().value.size();
  return mc_mean(mc, seed, stream_tag, [&](RandomStream& rng) {
    thread_local std::vector<double> acc;
    acc.assign(n, 0.0);
    for (const auto& piece : f.pieces) {
      double k = static_cast<double>(rng.poisson(piece.measure));
      if (compensated) k -= piece.measure;
      if (k == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) acc[j] += k * piece.value[j];
    }
    return std::pow(E.norm(acc), p);
  });
}

double rademacher_ratio(const std::vector<std::vector<double>>& x, double p, const SpaceSpec& E, RandomStream& rng) {
  const std::size_t m = x.size();
  const std::size_t n = x.front().size();
  double denom = 0.0;
  for (const auto& v : x) denom += std::pow(E.norm(v), p);
  if (!(denom > 0.0)) return 0.0;
  std::vector<double> acc(n);
  double num = 0.0;
  if (m <= 16) {
    const std::size_t total = std::size_t{1} << m;
    for (std::size_t mask = 0; mask < total; ++mask) {
      std::fill(acc.begin(), acc.end(), 0.0);
      for (std::size_t i = 0; i < m; ++i) {
        const double e = (mask >> i) & 1u ? 1.0 : -1.0;
        for (std::size_t j = 0; j < n; ++j) acc[j] += e * x[i][j];
      }
      num += std::pow(E.norm(acc), p);
    }
    num /= static_cast<double>(total);
  } else {
    const std::size_t draws = 1u << 14;
    for (std::size_t d = 0; d < draws; ++d) {
      std::fill(acc.begin(), acc.end(), 0.0);
      for (std::size_t i = 0; i < m; ++i) {
        const double e = (rng() & 1u) ? 1.0 : -1.0;
        for (std::size_t j = 0; j < n; ++j) acc[j] += e * x[i][j];
      }
      num += std::pow(E.norm(acc), p);
    }
    num /= static_cast<double>(draws);
  }
  return num / denom;
}

}  // namespace

double estimate_type_constant(const std::vector<std::vector<double>>& given, double p, const SpaceSpec& E,
                              std::size_t ensembles, std::uint64_t seed) {
  RandomStream rng(seed, stream_id({tag("type-constant")}));
  double k = 1.0;
  std::vector<std::vector<double>> nonzero;
  for (const auto& v : given)
    if (E.norm(v) > 0.0) nonzero.push_back(v);
  if (!nonzero.empty()) k = std::max(k, rademacher_ratio(nonzero, p, E, rng));
  const std::size_t n = given.empty() ? E.size() : given.front().size();
  // the coordinate basis
  std::vector<std::vector<double>> basis;
  for (std::size_t j = 0; j < std::min<std::size_t>(n, 16); ++j) {
    basis.emplace_back(n, 0.0);
    basis.back()[j] = 1.0 / E.weights()[j];
  }
  k = std::max(k, rademacher_ratio(basis, p, E, rng));
  for (std::size_t e = 0; e < ensembles; ++e) {
    const std::size_t m = 2 + e % 7;
    std::vector<std::vector<double>> x(m, std::vector<double>(n));
    for (auto& v : x)
      for (auto& c : v) c = rng.normal();
    k = std::max(k, rademacher_ratio(x, p, E, rng));
  }
  return k;
}

MomentReport verify_moment_inequality_p_le_1(const StepIntegrand& f, double p, const SpaceSpec& E, std::size_t mc,
                                             std::uint64_t seed, double band) {
  if (!(p > 0.0 && p <= 1.0)) throw ConfigError("verify_moment_inequality_p_le_1: p must lie in (0,1]");
  validate_step(f, E);
  MomentReport r;
  r.name = "poisson-integral-p-le-1";
  r.p = p;
  r.mc = mc;
  const auto st = poisson_moment(f, p, E, mc, seed, false, tag("moment-p-le-1"));
  r.lhs = st.mean;
  r.stderr_ = st.stderr_;
  r.rhs = rhs_sum(f, p, E);
  r.verdict = r.lhs <= r.rhs + band * r.stderr_;
  return r;
}

MomentReport verify_moment_inequality_type_p(const StepIntegrand& f, double p, const SpaceSpec& E, std::size_t mc,
                                             std::uint64_t seed, double band, double margin) {
  if (!(p > 1.0 && p <= 2.0)) throw ConfigError("verify_moment_inequality_type_p: p must lie in (1,2]");
  if (E.q() < p) throw ConfigError("verify_moment_inequality_type_p: need q >= p for a type-p space");
  validate_step(f, E);
  MomentReport r;
  r.name = "compensated-poisson-integral-type-p";
  r.p = p;
  r.mc = mc;
  r.margin = margin;
  const auto st = poisson_moment(f, p, E, mc, seed, true, tag("moment-type-p"));
  r.lhs = st.mean;
  r.stderr_ = st.stderr_;
  std::vector<std::vector<double>> given;
  for (const auto& piece : f.pieces) given.push_back(piece.value);
  r.type_constant = estimate_type_constant(given, p, E, 64, seed);
  const double base = rhs_sum(f, p, E);
  r.rhs = std::pow(2.0, 2.0 - p) * margin * r.type_constant * base;
  r.verdict = r.lhs <= r.rhs + band * r.stderr_;
  if (p == 2.0 && E.q() == 2.0) r.variance_identity = std::fabs(r.lhs - base) <= band * r.stderr_;
  return r;
}

}  // namespace levyou::jumpdecomp
