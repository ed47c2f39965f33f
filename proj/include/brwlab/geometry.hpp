#pragma once

#include <string>
#include <vector>

#include "brwlab/kernel.hpp"

namespace brw {

// Ball sizes around a vertex and a crude growth read-out. The tail ratio is
// (|B(R)| / |B(R/2)|)^(2/R): close to one for polynomial growth, close to the
// branching factor for trees.
struct BallGrowth {
  std::vector<std::int64_t> sizes;  // |B(x, r)| for r = 0..max_radius
  double tail_ratio = 0.0;
  bool looks_subexponential = false;  // tail ratio below 1.1
};
BallGrowth ball_growth(std::shared_ptr<const BRWModel> model, VertexId x, int max_radius);

// min over balls S = B(x, r), r < max_radius of (sum of kernel mass leaving
// S) / |S|. Every finite S bounds the isoperimetric constant from above, so
// this is a certified upper bound; a value near zero is evidence for
// amenability, a value bounded away from zero proves nothing by itself but
// matches nonamenable spaces.
struct IsoperimetricEstimate {
  double value = 0.0;
  int best_radius = 0;
  std::vector<double> per_radius;
};
IsoperimetricEstimate isoperimetric_upper(const MomentKernel& kernel, VertexId x, int max_radius);

// Looks for site weights kappa with kappa(x) m(x,y) = kappa(y) m(y,x) on the
// window: propagates kappa along a breadth-first tree and reports the worst
// relative mismatch over all window edges.
struct ReversibilityCheck {
  bool reversible = false;
  double residual = 0.0;
  std::vector<double> kappa;  // parallel to window.verts; 0 where unreached
  Window window;
  std::string obstruction;  // first hard failure (one-way edge), if any
};
ReversibilityCheck reversibility_check(const MomentKernel& kernel, VertexId x, int radius);

}  // namespace brw
