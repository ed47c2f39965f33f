#pragma once

#include <vector>

#include "brwlab/kernel.hpp"

namespace brw {

// First-arrival and full return series at a vertex. phi^(n) is the expected
// number of particles landing on x at step n whose ancestry avoided x at the
// intermediate steps; gamma^(n) = m^(n)_xx counts all of them. Partial sums
// are taken with weight lambda^n. Both series have nonnegative terms, so any
// partial sum of the first-arrival series exceeding one already certifies
// that the full series does.
struct SeriesResult {
  VertexId x = kNoVertex;
  double lambda = 1.0;
  std::vector<double> phi_terms;    // lambda^n phi^(n), n = 1..terms
  std::vector<double> gamma_terms;  // lambda^n gamma^(n), n = 0..terms
  double phi_sum = 0.0;
  double gamma_sum = 0.0;
  bool exceeded = false;  // stopped early because phi_sum crossed stop_above
  int terms = 0;          // last step evaluated
  // |1/(1 - phi_sum) - gamma_sum| when phi_sum < 1; the renewal identity
  // Gamma = 1/(1 - Phi) holds for the full series, so for well-converged
  // truncations this is small. NaN when the comparison is meaningless.
  double identity_residual = 0.0;
};

SeriesResult phi_gamma_series(const MomentKernel& kernel, VertexId x, double lambda, int N,
                              double stop_above = 10.0);

}  // namespace brw
