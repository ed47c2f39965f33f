#pragma once

#include <vector>

#include "brwlab/kernel.hpp"

namespace brw {

// Expected n-step particle counts, kept as logs so long horizons neither
// overflow nor underflow. Exact small values survive exp/log round trips to
// full double precision only approximately; tests compare logs where it
// matters.
struct MomentSequence {
  VertexId x = kNoVertex;
  VertexId y = kNoVertex;    // kNoVertex: sequence of row sums over all destinations
  std::vector<double> logs;  // index n = 0..N; -inf where the count is zero

  int horizon() const { return static_cast<int>(logs.size()) - 1; }
  double log_value(int n) const { return logs.at(static_cast<std::size_t>(n)); }
  double value(int n) const;  // may be +inf when the log exceeds double range
};

// log E(number of particles at y after n steps | one particle at x), n=0..N.
// Pass y = kNoVertex for expected total population size instead. Expands the
// support as needed; a lazy model whose cap is too small for N throws
// CapExceededError rather than returning a partial answer.
MomentSequence n_step_moments(const MomentKernel& kernel, VertexId x, VertexId y, int N);

// Growth rates read off the moment sequences. The diagonal bound is certified:
// by supermultiplicativity every (m^(n)_xx)^(1/n) with a positive entry lies
// below the upper growth rate, so the reported maximum is a true lower bound.
// The row-sum rate is a tail estimate of a liminf and is not certified.
struct GrowthEstimate {
  MomentSequence diag;      // m^(n)_xx
  MomentSequence row_sums;  // sum_y m^(n)_xy
  double ms_lower = 0.0;    // max_n (m^(n)_xx)^(1/n)
  int ms_argmax = 0;
  double mw_estimate = 0.0;  // min over the tail window of (row sum)^(1/n)
  double mw_tail_min = 0.0, mw_tail_max = 0.0;
  int period_seen = 0;  // gcd of n with m^(n)_xx > 0; 0 if none seen
};

GrowthEstimate estimate_growth_rates(const MomentKernel& kernel, VertexId x, int N,
                                     int tail = 8);

}  // namespace brw
