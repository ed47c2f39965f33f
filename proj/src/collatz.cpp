#include "brwlab/collatz.hpp"

#include <cmath>

#include "brwlab/genfun.hpp"

namespace brw {

InequalityCheck survival_inequality_nonlinear(const MomentKernel& kernel, const Window& w,
                                              const std::vector<double>& v, double tol) {
  if (v.size() != w.size()) throw DomainError("value vector must match the window");
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!(v[i] > 0.0) || !(v[i] < 1.0))
      throw DomainError("nonlinear form needs values strictly between 0 and 1");
  std::vector<char> interior = interior_mask(*w.model, w);
  InequalityCheck res;
  res.tol = tol;
  res.min_slack = kInf;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!interior[i]) continue;
    double mv = 0.0;
    for (const auto& [child, m] : kernel.row(w.verts[i]).entries) {
      int j = w.index_of(child);
      mv += m * v[static_cast<std::size_t>(j)];
    }
    double slack = mv - v[i] / (1.0 - v[i]);
    ++res.coords_checked;
    if (slack < res.min_slack) {
      res.min_slack = slack;
      res.worst = w.verts[i];
    }
  }
  if (res.coords_checked == 0) throw DomainError("no checkable coordinates in the window");
  res.holds = res.min_slack >= -tol;
  return res;
}

InequalityCheck survival_inequality_linear(const MomentKernel& kernel, const Window& w,
                                           const std::vector<double>& v, int n, double tol) {
  if (v.size() != w.size()) throw DomainError("value vector must match the window");
  if (n < 1) throw DomainError("power must be at least one");
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!(v[i] > 0.0)) throw DomainError("linear form needs positive values");

  // u after k applications is trustworthy at distance <= radius - k.
  std::vector<double> u = v, next(v.size());
  for (int k = 1; k <= n; ++k) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w.dist[i] > w.radius - k) {
        next[i] = 0.0;
        continue;
      }
      double s = 0.0;
      for (const auto& [child, m] : kernel.row(w.verts[i]).entries) {
        int j = w.index_of(child);
        if (j < 0) throw DomainError("window too small for the requested power");
        s += m * u[static_cast<std::size_t>(j)];
      }
      next[i] = s;
    }
    u = next;
  }

  InequalityCheck res;
  res.tol = tol;
  res.min_slack = kInf;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w.dist[i] > w.radius - n) continue;
    double slack = u[i] - v[i];
    ++res.coords_checked;
    if (slack < res.min_slack) {
      res.min_slack = slack;
      res.worst = w.verts[i];
    }
  }
  if (res.coords_checked == 0) throw DomainError("no checkable coordinates in the window");
  res.holds = res.min_slack >= -tol;
  return res;
}

}  // namespace brw
