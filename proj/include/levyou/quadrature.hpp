#pragma once

#include <functional>

namespace levyou {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
};

// Adaptive Gauss-Kronrod (61 point) on [a,b]; either bound may be infinite.
// Throws QuadratureError if the estimated error exceeds
// max(rel_tol*|value|, abs_tol).
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double rel_tol = 1e-8, double abs_tol = 0.0, unsigned max_depth = 25);

// Same, for integrands with integrable endpoint singularities (tanh-sinh).
QuadratureResult integrate_singular(const std::function<double(double)>& f, double a, double b,
                                    double rel_tol = 1e-8, double abs_tol = 0.0);

}  // namespace levyou
