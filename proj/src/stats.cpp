#include "levyou/stats.hpp"

#include <algorithm>
#include <map>

#include "levyou/errors.hpp"

namespace levyou {

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("fit_line: need >= 2 points of equal length");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw ConfigError("fit_line: degenerate abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (x.size() > 2) {
    double rss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - f.intercept - f.slope * x[i];
      rss += r * r;
    }
    f.slope_stderr = std::sqrt(rss / (n - 2.0) / sxx);
  }
  return f;
}

double ks_poisson(const std::vector<std::uint64_t>& counts, double mean) {
  if (counts.empty()) return 0.0;
  std::map<std::uint64_t, std::size_t> freq;
  for (auto c : counts) ++freq[c];
  const double n = static_cast<double>(counts.size());
  const std::uint64_t kmax = freq.rbegin()->first + 1;
  double d = 0.0, emp = 0.0, p = std::exp(-mean), cdf = 0.0;
  for (std::uint64_t k = 0; k <= kmax; ++k) {
    if (k > 0) p *= mean / static_cast<double>(k);
    cdf += p;
    auto it = freq.find(k);
    if (it != freq.end()) emp += static_cast<double>(it->second) / n;
    d = std::max(d, std::fabs(emp - cdf));
  }
  return d;
}

}  // namespace levyou
