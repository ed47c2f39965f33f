#include "brwlab/moments.hpp"

#include <cmath>
#include <numeric>
#include <unordered_map>

namespace brw {

double MomentSequence::value(int n) const {
  double l = log_value(n);
  return l == -kInf ? 0.0 : std::exp(l);
}

MomentSequence n_step_moments(const MomentKernel& kernel, VertexId x, VertexId y, int N) {
  if (N < 0) throw DomainError("moment horizon must be nonnegative");
  MomentSequence seq;
  seq.x = x;
  seq.y = y;
  seq.logs.reserve(static_cast<std::size_t>(N) + 1);

  std::unordered_map<VertexId, double> cur;
  cur[x] = 1.0;
  double log_scale = 0.0;
  auto record = [&] {
    if (y == kNoVertex) {
      double total = 0.0;
      for (const auto& [v, val] : cur) {
        (void)v;
        total += val;
      }
      seq.logs.push_back(total > 0.0 ? std::log(total) + log_scale : -kInf);
    } else {
      auto it = cur.find(y);
      seq.logs.push_back(it != cur.end() && it->second > 0.0 ? std::log(it->second) + log_scale
                                                             : -kInf);
    }
  };
  record();

  for (int n = 1; n <= N; ++n) {
    std::unordered_map<VertexId, double> next;
    next.reserve(cur.size() * 2 + 8);
    for (const auto& [u, val] : cur) {
      const auto& row = kernel.row(u);  // may throw CapExceededError; propagate
      for (const auto& [w, m] : row.entries) next[w] += val * m;
    }
    double peak = 0.0;
    for (const auto& [v, val] : next) {
      (void)v;
      peak = std::max(peak, val);
    }
    if (peak > 0.0 && (peak > 1e100 || peak < 1e-100)) {
      for (auto& [v, val] : next) {
        (void)v;
        val /= peak;
      }
      log_scale += std::log(peak);
    }
    cur = std::move(next);
    record();
    if (cur.empty()) {
      for (int rest = n + 1; rest <= N; ++rest) seq.logs.push_back(-kInf);
      break;
    }
  }
  return seq;
}

GrowthEstimate estimate_growth_rates(const MomentKernel& kernel, VertexId x, int N, int tail) {
  if (N < 1) throw DomainError("growth estimation needs a horizon of at least one step");
  GrowthEstimate g;
  g.diag = n_step_moments(kernel, x, x, N);
  g.row_sums = n_step_moments(kernel, x, kNoVertex, N);

  double best = -kInf;
  for (int n = 1; n <= N; ++n) {
    double l = g.diag.log_value(n);
    if (l == -kInf) continue;
    g.period_seen = std::gcd(g.period_seen, n);
    double rate = l / n;
    if (rate > best) {
      best = rate;
      g.ms_argmax = n;
    }
  }
  g.ms_lower = best == -kInf ? 0.0 : std::exp(best);

  int lo = std::max(1, N - std::max(1, tail) + 1);
  double mn = kInf, mx = -kInf;
  for (int n = lo; n <= N; ++n) {
    double l = g.row_sums.log_value(n);
    double rate = l == -kInf ? 0.0 : std::exp(l / n);
    mn = std::min(mn, rate);
    mx = std::max(mx, rate);
  }
  g.mw_tail_min = mn;
  g.mw_tail_max = mx;
  g.mw_estimate = mn;
  return g;
}

}  // namespace brw
