#include "brwlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

namespace brw {

BallGrowth ball_growth(std::shared_ptr<const BRWModel> model, VertexId x, int max_radius) {
  Window w = make_ball(model, x, max_radius);
  BallGrowth g;
  g.sizes.assign(static_cast<std::size_t>(max_radius) + 1, 0);
  for (std::size_t i = 0; i < w.size(); ++i) g.sizes[static_cast<std::size_t>(w.dist[i])]++;
  for (std::size_t r = 1; r < g.sizes.size(); ++r) g.sizes[r] += g.sizes[r - 1];
  int half = max_radius / 2;
  if (max_radius >= 2 && g.sizes[static_cast<std::size_t>(half)] > 0) {
    double ratio = static_cast<double>(g.sizes.back()) /
                   static_cast<double>(g.sizes[static_cast<std::size_t>(half)]);
    g.tail_ratio = std::pow(ratio, 1.0 / (max_radius - half));
    g.looks_subexponential = g.tail_ratio < 1.1;
  }
  return g;
}

IsoperimetricEstimate isoperimetric_upper(const MomentKernel& kernel, VertexId x,
                                          int max_radius) {
  if (max_radius < 1) throw DomainError("need radius at least one");
  Window w = make_ball(kernel.model_ptr(), x, max_radius);
  IsoperimetricEstimate est;
  est.value = kInf;
  for (int r = 0; r < max_radius; ++r) {
    double boundary = 0.0;
    std::int64_t size = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w.dist[i] > r) continue;
      ++size;
      for (const auto& [child, m] : kernel.row(w.verts[i]).entries) {
        int j = w.index_of(child);
        if (j < 0 || w.dist[static_cast<std::size_t>(j)] > r) boundary += m;
      }
    }
    double ratio = boundary / static_cast<double>(size);
    est.per_radius.push_back(ratio);
    if (ratio < est.value) {
      est.value = ratio;
      est.best_radius = r;
    }
  }
  return est;
}

ReversibilityCheck reversibility_check(const MomentKernel& kernel, VertexId x, int radius) {
  ReversibilityCheck res;
  res.window = make_ball(kernel.model_ptr(), x, radius);
  const Window& w = res.window;
  const BRWModel& model = *w.model;
  res.kappa.assign(w.size(), 0.0);

  std::vector<char> active(w.size(), 1);
  for (std::size_t i = 0; i < w.size(); ++i)
    if (!model.is_finite() && w.dist[i] >= w.radius) active[i] = 0;

  auto mass = [&](std::size_t i, std::size_t j) {
    return kernel.entry(w.verts[i], w.verts[j]);
  };

  int start = w.index_of(x);
  res.kappa[static_cast<std::size_t>(start)] = 1.0;
  std::deque<std::size_t> q{static_cast<std::size_t>(start)};
  while (!q.empty()) {
    std::size_t i = q.front();
    q.pop_front();
    for (const auto& [child, m] : kernel.row(w.verts[i]).entries) {
      int jj = w.index_of(child);
      if (jj < 0) continue;
      std::size_t j = static_cast<std::size_t>(jj);
      if (!active[j] || j == i || res.kappa[j] != 0.0) continue;
      double back = mass(j, i);
      if (back <= 0.0) {
        if (res.obstruction.empty()) {
          std::ostringstream msg;
          msg << "mass flows only one way between '" << model.label(w.verts[i]) << "' and '"
              << model.label(w.verts[j]) << "'";
          res.obstruction = msg.str();
        }
        continue;
      }
      res.kappa[j] = res.kappa[i] * m / back;
      q.push_back(j);
    }
  }

  double worst = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!active[i] || res.kappa[i] == 0.0) continue;
    for (const auto& [child, m] : kernel.row(w.verts[i]).entries) {
      int jj = w.index_of(child);
      if (jj < 0) continue;
      std::size_t j = static_cast<std::size_t>(jj);
      if (!active[j] || j == i || res.kappa[j] == 0.0) continue;
      double lhs = res.kappa[i] * m, rhs = res.kappa[j] * mass(j, i);
      double scale = std::max({lhs, rhs, 1e-300});
      worst = std::max(worst, std::fabs(lhs - rhs) / scale);
    }
  }
  res.residual = worst;
  res.reversible = res.obstruction.empty() && worst < 1e-9;
  return res;
}

}  // namespace brw
