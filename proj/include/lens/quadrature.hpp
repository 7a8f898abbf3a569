#pragma once

#include <functional>

namespace lens {

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = false;
  long evaluations = 0;
};

// Adaptive Gauss-Kronrod 7/15 with recursive bisection. The embedded
// 7-point Gauss value provides the per-interval error estimate.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a,
                              double b, double abs_tol, int max_depth = 28);

}  // namespace lens
