#include "brwlab/series.hpp"

#include <cmath>
#include <limits>
#include <unordered_map>

#include "brwlab/moments.hpp"

namespace brw {

SeriesResult phi_gamma_series(const MomentKernel& kernel, VertexId x, double lambda, int N,
                              double stop_above) {
  if (N < 1) throw DomainError("series need at least one step");
  if (lambda < 0.0) throw DomainError("series weight must be nonnegative");
  SeriesResult res;
  res.x = x;
  res.lambda = lambda;

  // Arrivals that avoided x so far, weighted by lambda per step: zero the x
  // coordinate, multiply by the kernel, read off the new x coordinate.
  std::unordered_map<VertexId, double> cur;
  cur[x] = 1.0;
  for (int n = 1; n <= N; ++n) {
    cur.erase(x);
    std::unordered_map<VertexId, double> next;
    next.reserve(cur.size() * 2 + 8);
    for (const auto& [u, val] : cur) {
      for (const auto& [w, m] : kernel.row(u).entries) next[w] += val * lambda * m;
    }
    if (n == 1) {
      // first step starts at x itself
      for (const auto& [w, m] : kernel.row(x).entries) next[w] += lambda * m;
    }
    cur = std::move(next);
    auto it = cur.find(x);
    double term = it == cur.end() ? 0.0 : it->second;
    res.phi_terms.push_back(term);
    res.phi_sum += term;
    res.terms = n;
    if (res.phi_sum > stop_above) {
      res.exceeded = true;
      break;
    }
    if (cur.empty()) break;
  }

  MomentSequence diag = n_step_moments(kernel, x, x, res.terms);
  double log_lambda = lambda > 0.0 ? std::log(lambda) : -kInf;
  for (int n = 0; n <= res.terms; ++n) {
    double l = diag.log_value(n);
    double term = l == -kInf ? 0.0 : std::exp(l + n * (n == 0 ? 0.0 : log_lambda));
    if (n == 0) term = 1.0;
    res.gamma_terms.push_back(term);
    res.gamma_sum += term;
  }

  if (!res.exceeded && res.phi_sum < 1.0)
    res.identity_residual = std::fabs(1.0 / (1.0 - res.phi_sum) - res.gamma_sum);
  else
    res.identity_residual = std::numeric_limits<double>::quiet_NaN();
  return res;
}

}  // namespace brw
