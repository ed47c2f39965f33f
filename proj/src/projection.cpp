#include "brwlab/projection.hpp"

#include <cmath>
#include <deque>
#include <map>
#include <set>
#include <sstream>

#include "brwlab/genfun.hpp"
#include "brwlab/rng.hpp"

namespace brw {

namespace {

using PushedConfig = std::vector<std::pair<std::string, std::int64_t>>;

struct PushedLaw {
  int kind = 0;  // 0 explicit, 1 diffusion finite, 2 diffusion geometric, 3 rates
  std::map<PushedConfig, double> outcomes;            // explicit
  std::map<std::int64_t, double> count_pmf;           // diffusion finite
  double geometric_mean = 0.0;                        // diffusion geometric
  std::map<std::string, double> placement;            // diffusion / rates
};

PushedLaw push_law(const BRWModel& model, const SiteLaw& law,
                   const std::function<std::string(const std::string&)>& g) {
  PushedLaw out;
  if (const auto* e = law.as_explicit()) {
    out.kind = 0;
    for (const auto& [cfg, p] : e->outcomes) {
      std::map<std::string, std::int64_t> merged;
      for (const auto& [child, c] : cfg.counts) merged[g(model.label(child))] += c;
      PushedConfig key(merged.begin(), merged.end());
      out.outcomes[key] += p;
    }
    return out;
  }
  const auto* d = law.as_diffusion();
  if (d->from_rates) {
    out.kind = 3;
    for (const auto& [child, k] : d->rates) out.placement[g(model.label(child))] += k;
    return out;
  }
  if (std::holds_alternative<GeometricCountLaw>(d->count)) {
    out.kind = 2;
    out.geometric_mean = std::get<GeometricCountLaw>(d->count).mean;
  } else {
    out.kind = 1;
    for (const auto& [c, p] : std::get<FiniteCountLaw>(d->count).pmf) out.count_pmf[c] += p;
  }
  for (const auto& [child, p] : d->placement) out.placement[g(model.label(child))] += p;
  return out;
}

bool map_close(const std::map<std::string, double>& a, const std::map<std::string, double>& b,
               double tol) {
  if (a.size() != b.size()) return false;
  auto ia = a.begin();
  for (auto ib = b.begin(); ib != b.end(); ++ia, ++ib) {
    if (ia->first != ib->first) return false;
    if (std::fabs(ia->second - ib->second) > tol * std::max(1.0, std::fabs(ia->second)))
      return false;
  }
  return true;
}

bool pushed_equal(const PushedLaw& a, const PushedLaw& b, double tol) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case 0: {
      if (a.outcomes.size() != b.outcomes.size()) return false;
      auto ia = a.outcomes.begin();
      for (auto ib = b.outcomes.begin(); ib != b.outcomes.end(); ++ia, ++ib) {
        if (ia->first != ib->first) return false;
        if (std::fabs(ia->second - ib->second) > tol) return false;
      }
      return true;
    }
    case 1: {
      if (a.count_pmf.size() != b.count_pmf.size()) return false;
      auto ia = a.count_pmf.begin();
      for (auto ib = b.count_pmf.begin(); ib != b.count_pmf.end(); ++ia, ++ib)
        if (ia->first != ib->first || std::fabs(ia->second - ib->second) > tol) return false;
      return map_close(a.placement, b.placement, tol);
    }
    case 2:
      return std::fabs(a.geometric_mean - b.geometric_mean) <=
                 tol * std::max(1.0, a.geometric_mean) &&
             map_close(a.placement, b.placement, tol);
    default:
      return map_close(a.placement, b.placement, tol);
  }
}

RawSiteLaw to_raw(const PushedLaw& p) {
  switch (p.kind) {
    case 0: {
      RawExplicitLaw law;
      for (const auto& [cfg, prob] : p.outcomes) law.outcomes.push_back({cfg, prob});
      return law;
    }
    case 1: {
      RawDiffusionLaw law;
      law.count = FiniteCountLaw{{p.count_pmf.begin(), p.count_pmf.end()}};
      law.placement.assign(p.placement.begin(), p.placement.end());
      return law;
    }
    case 2: {
      RawDiffusionLaw law;
      law.count = GeometricCountLaw{p.geometric_mean};
      law.placement.assign(p.placement.begin(), p.placement.end());
      return law;
    }
    default: {
      RawRatesLaw law;
      law.rates.assign(p.placement.begin(), p.placement.end());
      return law;
    }
  }
}

}  // namespace

ProjectionResult project_by_relabeling(const std::shared_ptr<const BRWModel>& model, int radius,
                                       const std::function<std::string(const std::string&)>& g) {
  ProjectionResult res;
  Window w = make_ball(model, model->root(), radius);
  const double tol = 1e-12;

  std::map<std::string, std::pair<std::string, PushedLaw>> classes;  // class -> (rep, law)
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!model->is_finite() && w.dist[i] >= w.radius) continue;
    const std::string& label = model->label(w.verts[i]);
    std::string cls = g(label);
    PushedLaw pushed = push_law(*model, model->law(w.verts[i]), g);
    auto it = classes.find(cls);
    if (it == classes.end()) {
      classes.emplace(cls, std::make_pair(label, std::move(pushed)));
    } else if (!pushed_equal(it->second.second, pushed, tol)) {
      std::ostringstream msg;
      msg << "fiber of class '" << cls << "' is inhomogeneous: '" << it->second.first
          << "' and '" << label << "' push to different laws";
      res.obstruction = msg.str();
      return res;
    }
  }

  // Close the quotient over classes reachable from the projected root.
  std::string root_cls = g(model->label(model->root()));
  if (!classes.count(root_cls)) {
    res.obstruction = "no interior representative for the root class";
    return res;
  }
  std::vector<std::pair<std::string, RawSiteLaw>> table;
  std::set<std::string> enqueued{root_cls};
  std::deque<std::string> queue{root_cls};
  while (!queue.empty()) {
    std::string cls = queue.front();
    queue.pop_front();
    auto it = classes.find(cls);
    if (it == classes.end()) {
      std::ostringstream msg;
      msg << "window has no interior representative of reachable class '" << cls
          << "'; enlarge the radius (or the quotient is not finite)";
      res.obstruction = msg.str();
      return res;
    }
    const PushedLaw& p = it->second.second;
    table.push_back({cls, to_raw(p)});
    res.fibers.push_back({cls, it->second.first});
    auto touch = [&](const std::string& child) {
      if (enqueued.insert(child).second) queue.push_back(child);
    };
    if (p.kind == 0) {
      for (const auto& [cfg, prob] : p.outcomes) {
        (void)prob;
        for (const auto& [child, c] : cfg) {
          (void)c;
          touch(child);
        }
      }
    } else {
      for (const auto& [child, v] : p.placement) {
        (void)v;
        touch(child);
      }
    }
  }

  ModelOptions qopt;
  qopt.lambda = model->lambda();
  qopt.time = model->time_kind();
  qopt.name = model->name() + "/quotient";
  res.quotient = BRWModel::finite(root_cls, table, qopt);
  res.exact = true;

  // Cross-check: generating functions commute with the relabeling on seeded
  // random inputs.
  Window wq = make_ball(res.quotient, res.quotient->root(),
                        static_cast<int>(table.size()) + 1);
  for (int trial = 0; trial < 20; ++trial) {
    RngStream rng(defaults::master_seed, static_cast<std::uint64_t>(trial), 0,
                  fnv1a64(std::string("projection")), 0);
    std::vector<double> z(wq.size());
    for (auto& v : z) v = rng.next_unit();
    std::vector<double> zg(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
      int j = wq.index_of(res.quotient->find(g(model->label(w.verts[i]))).value());
      zg[i] = z[static_cast<std::size_t>(j)];
    }
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (!model->is_finite() && w.dist[i] >= w.radius) continue;
      VertexId qx = res.quotient->find(g(model->label(w.verts[i]))).value();
      double a = eval_G(*model, w.verts[i], w, zg, 0.0);
      double b = eval_G(*res.quotient, qx, wq, z, 0.0);
      res.max_residual = std::max(res.max_residual, std::fabs(a - b));
    }
  }
  return res;
}

}  // namespace brw
