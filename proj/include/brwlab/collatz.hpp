#pragma once

#include <vector>

#include "brwlab/kernel.hpp"

namespace brw {

// Pointwise inequality checks used as survival certificates for
// geometric-count processes. The kernel rows already carry the intensity, so
// (Mv)(x) below is the weighted neighbor sum.
struct InequalityCheck {
  bool holds = false;
  double min_slack = 0.0;     // min over checked coordinates of lhs - rhs
  VertexId worst = kNoVertex; // coordinate attaining it
  int coords_checked = 0;
  double tol = 0.0;
};

// (Mv)(x) >= v(x) / (1 - v(x)) for every checkable x. v must take values in
// (0,1) on the window; coordinates whose children leave the window are
// skipped (their neighbor sum would be incomplete).
InequalityCheck survival_inequality_nonlinear(const MomentKernel& kernel, const Window& w,
                                              const std::vector<double>& v, double tol = 1e-12);

// (M^n v)(x) >= v(x), checked for x at distance <= radius - n so the n-step
// neighbor sums stay inside the window. v must be positive and bounded.
InequalityCheck survival_inequality_linear(const MomentKernel& kernel, const Window& w,
                                           const std::vector<double>& v, int n,
                                           double tol = 1e-12);

}  // namespace brw
