#pragma once

#include <vector>

#include "brwlab/model.hpp"

namespace brw {

// Radius of convergence of the return series at x, approached through
// truncations: for each window radius, the spectral radius of the visible
// part of x's class. Visible radii grow with the window, so their inverses
// decrease to the true convergence radius.
struct ConvergenceSequence {
  VertexId x = kNoVertex;
  std::vector<int> radii;
  std::vector<double> rho;  // visible class spectral radius; 0 when no cycle yet
  std::vector<double> R;    // 1/rho, +inf when rho is 0
  bool monotone_ok = false; // R nonincreasing within tolerance
  double last_gap = 0.0;    // R[k-1] - R[k] for the final pair
};

ConvergenceSequence convergence_parameter_sequence(std::shared_ptr<const BRWModel> model,
                                                   VertexId x, const std::vector<int>& radii);

}  // namespace brw
