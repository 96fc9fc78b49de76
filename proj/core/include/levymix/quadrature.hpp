#pragma once

#include <functional>

namespace levymix {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // absolute error bound accumulated by the refinement
  long evals = 0;
};

// Adaptive Simpson on [a, b]. The integrand must be finite on the closed
// interval; split at kinks before calling.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double abs_tol, int max_depth = 48);

// Semi-infinite [a, inf) via the substitution z = a + t/(1-t).
QuadResult integrate_to_inf(const std::function<double(double)>& f, double a, double abs_tol);

}  // namespace levymix
