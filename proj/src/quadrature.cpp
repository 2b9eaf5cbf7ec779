#include "levyou/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>

#include "levyou/errors.hpp"

namespace levyou {

namespace {

void accept_or_throw(const QuadratureResult& r, double l1, double rel_tol, double abs_tol, const char* who) {
  if (!std::isfinite(r.value)) throw QuadratureError(std::string(who) + ": non-finite integral", r.error, rel_tol);
  const double scale = std::max(std::fabs(r.value), 1e-300);
  const double allowed = std::max({rel_tol * std::fabs(r.value), abs_tol, 64.0 * std::numeric_limits<double>::epsilon() * l1});
  if (!(r.error <= allowed))
    throw QuadratureError(std::string(who) + ": no convergence, value " + std::to_string(r.value), r.error / scale,
                          rel_tol);
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                           double abs_tol, unsigned max_depth) {
  if (a == b) return {};
  QuadratureResult r;
  double l1 = 0.0;
  // request a slightly tighter tolerance than the acceptance check: the
  // Kronrod estimate is relative to the L1 norm
  // Boost compares an error estimate in the reference coordinates against a
  // tolerance in the original ones, so short intervals never converge; map
  // finite intervals onto [0,1] first.
  if (std::isfinite(a) && std::isfinite(b)) {
    const double len = b - a;
    auto g = [&](double x) { return len * f(a + len * x); };
    r.value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, 0.0, 1.0, max_depth, 0.25 * rel_tol,
                                                                             &r.error, &l1);
    if (len < 0) l1 = -l1;
  } else {
    r.value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, max_depth, 0.25 * rel_tol,
                                                                             &r.error, &l1);
  }
  accept_or_throw(r, l1, rel_tol, abs_tol, "gauss_kronrod");
  return r;
}

QuadratureResult integrate_singular(const std::function<double(double)>& f, double a, double b, double rel_tol,
                                    double abs_tol) {
  if (a == b) return {};
  boost::math::quadrature::tanh_sinh<double> ts;
  QuadratureResult r;
  double l1 = 0.0;
  r.value = ts.integrate(f, a, b, 0.25 * rel_tol, &r.error, &l1);
  accept_or_throw(r, l1, rel_tol, abs_tol, "tanh_sinh");
  return r;
}

}  // namespace levyou
