#include "brwlab/perron.hpp"

#include <cmath>
#include <deque>
#include <numeric>
#include <unordered_map>

namespace brw {

namespace {

struct Sparse {
  int n = 0;
  std::vector<std::vector<std::pair<int, double>>> rows;  // row i: (j, a_ij)
};

// gcd of cycle lengths via breadth-first levels; 0 when the support digraph
// has no cycle at all (then there is no Perron problem to solve).
int support_period(const Sparse& A) {
  std::vector<int> level(A.n, -1);
  std::deque<int> q{0};
  level[0] = 0;
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    for (const auto& [v, a] : A.rows[u]) {
      (void)a;
      if (level[v] < 0) {
        level[v] = level[u] + 1;
        q.push_back(v);
      }
    }
  }
  int g = 0;
  for (int u = 0; u < A.n; ++u)
    for (const auto& [v, a] : A.rows[u]) {
      (void)a;
      if (level[u] < 0 || level[v] < 0) continue;
      g = std::gcd(g, std::abs(level[u] + 1 - level[v]));
    }
  return g;
}

PerronResult sandwich(const Sparse& A, double tol, long max_iters) {
  PerronResult res;
  int d = support_period(A);
  if (d == 0) throw DomainError("class has no cycle, spectral radius is zero");
  res.period = d;

  std::vector<double> x(static_cast<std::size_t>(A.n), 1.0);
  std::vector<double> y(x.size()), tmp(x.size());
  double lo_best = 0.0, hi_best = kInf;
  for (long iter = 1; iter <= max_iters; ++iter) {
    y = x;
    for (int step = 0; step < d; ++step) {
      for (int i = 0; i < A.n; ++i) {
        double s = 0.0;
        for (const auto& [j, a] : A.rows[i]) s += a * y[static_cast<std::size_t>(j)];
        tmp[static_cast<std::size_t>(i)] = s;
      }
      y.swap(tmp);
    }
    double lo = kInf, hi = 0.0, peak = 0.0;
    for (int i = 0; i < A.n; ++i) {
      double r = y[static_cast<std::size_t>(i)] / x[static_cast<std::size_t>(i)];
      lo = std::min(lo, r);
      hi = std::max(hi, r);
      peak = std::max(peak, y[static_cast<std::size_t>(i)]);
    }
    lo_best = std::max(lo_best, lo);
    hi_best = std::min(hi_best, hi);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = y[i] / peak;
    res.iterations = iter;
    if (hi_best - lo_best <= tol * std::max(1.0, hi_best)) {
      res.converged = true;
      break;
    }
  }
  double inv_d = 1.0 / d;
  res.lower = std::pow(lo_best, inv_d);
  res.upper = std::pow(hi_best, inv_d);
  res.value = std::pow(0.5 * (lo_best + hi_best), inv_d);
  res.vec = std::move(x);
  return res;
}

}  // namespace

PerronResult class_perron(const MomentKernel& kernel, const DigraphAnalysis& a, int cls,
                          double tol, long max_iters) {
  if (cls < 0 || cls >= static_cast<int>(a.members.size()))
    throw DomainError("no such class");
  const auto& member_idx = a.members[static_cast<std::size_t>(cls)];
  Sparse A;
  A.n = static_cast<int>(member_idx.size());
  A.rows.resize(member_idx.size());
  std::unordered_map<VertexId, int> local;
  std::vector<VertexId> members;
  members.reserve(member_idx.size());
  for (int i = 0; i < A.n; ++i) {
    VertexId v = a.window.verts[static_cast<std::size_t>(member_idx[static_cast<std::size_t>(i)])];
    local[v] = i;
    members.push_back(v);
  }
  for (int i = 0; i < A.n; ++i) {
    for (const auto& [w, m] : kernel.row(members[static_cast<std::size_t>(i)]).entries) {
      auto it = local.find(w);
      if (it != local.end()) A.rows[static_cast<std::size_t>(i)].push_back({it->second, m});
    }
  }
  PerronResult res = sandwich(A, tol, max_iters);
  res.members = std::move(members);
  return res;
}

PerronResult dense_perron(const std::vector<std::vector<double>>& M, double tol,
                          long max_iters) {
  int n = static_cast<int>(M.size());
  if (n == 0) throw DomainError("empty matrix");
  Sparse A;
  A.n = n;
  A.rows.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(M[static_cast<std::size_t>(i)].size()) != n)
      throw DomainError("matrix must be square");
    for (int j = 0; j < n; ++j) {
      double v = M[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (v < 0.0) throw DomainError("matrix must be nonnegative");
      if (v > 0.0) A.rows[static_cast<std::size_t>(i)].push_back({j, v});
    }
  }
  // strong connectivity both ways from 0
  auto reach = [&](bool forward) {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::deque<int> q{0};
    seen[0] = 1;
    int count = 1;
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      for (int v = 0; v < n; ++v) {
        double a = forward ? M[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)]
                           : M[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)];
        if (a > 0.0 && !seen[static_cast<std::size_t>(v)]) {
          seen[static_cast<std::size_t>(v)] = 1;
          ++count;
          q.push_back(v);
        }
      }
    }
    return count == n;
  };
  if (!reach(true) || !reach(false))
    throw DomainError("matrix support is not strongly connected");
  return sandwich(A, tol, max_iters);
}

}  // namespace brw
