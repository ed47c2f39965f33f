#include "brwlab/classify.hpp"

#include <deque>
#include <sstream>

#include "brwlab/digraph.hpp"
#include "brwlab/moments.hpp"
#include "brwlab/perron.hpp"
#include "brwlab/series.hpp"

namespace brw {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Survives: return "survives";
    case Verdict::Dies: return "dies";
    default: return "undecided";
  }
}

LocalSurvivalReport classify_local_survival(const std::shared_ptr<const BRWModel>& model,
                                            VertexId x, int radius, int horizon) {
  LocalSurvivalReport rep;
  rep.x = x;
  rep.radius = radius;
  rep.horizon = horizon;
  MomentKernel kernel(model);
  DigraphAnalysis a = analyze_digraph(kernel, x, radius);
  int cls = a.class_of_vertex(x);
  rep.class_fully_visible = cls >= 0 && !a.touches_boundary[static_cast<std::size_t>(cls)];

  const double tol = 1e-9;
  if (a.period[static_cast<std::size_t>(cls)] > 0) {
    PerronResult p = class_perron(kernel, a, cls);
    rep.class_rho = p.value;
    if (rep.class_fully_visible) {
      std::ostringstream msg;
      if (p.lower > 1.0 + tol) {
        rep.verdict = Verdict::Survives;
        msg << "finite class is supercritical (spectral radius " << p.value << ")";
      } else if (p.upper < 1.0 - tol) {
        rep.verdict = Verdict::Dies;
        msg << "finite class is subcritical (spectral radius " << p.value << ")";
      } else {
        rep.verdict = Verdict::Dies;
        msg << "finite class is critical (spectral radius " << p.value
            << "); nondegenerate laws die out at criticality";
      }
      rep.reason = msg.str();
      return rep;
    }
    if (p.lower > 1.0 + tol) {
      rep.verdict = Verdict::Survives;
      std::ostringstream msg;
      msg << "visible part of the class is already supercritical (spectral radius >= "
          << p.lower << ")";
      rep.reason = msg.str();
      return rep;
    }
  } else if (rep.class_fully_visible) {
    rep.verdict = Verdict::Dies;
    rep.reason = "no return cycle at this vertex";
    return rep;
  }

  // One-sided certificates on the truncated horizon.
  SeriesResult s = phi_gamma_series(kernel, x, 1.0, horizon, 2.0);
  rep.phi_partial = s.phi_sum;
  GrowthEstimate g = estimate_growth_rates(kernel, x, horizon);
  rep.ms_lower = g.ms_lower;
  if (s.phi_sum > 1.0 + tol) {
    rep.verdict = Verdict::Survives;
    std::ostringstream msg;
    msg << "first-arrival partial sum " << s.phi_sum << " exceeds one after " << s.terms
        << " steps";
    rep.reason = msg.str();
    return rep;
  }
  if (g.ms_lower > 1.0 + tol) {
    rep.verdict = Verdict::Survives;
    std::ostringstream msg;
    msg << "certified diagonal growth bound " << g.ms_lower << " exceeds one (step "
        << g.ms_argmax << ")";
    rep.reason = msg.str();
    return rep;
  }
  rep.verdict = Verdict::Undecided;
  std::ostringstream msg;
  msg << "no certificate fired within radius " << radius << " and horizon " << horizon
      << " (first-arrival sum " << s.phi_sum << ", growth bound " << g.ms_lower << ")";
  rep.reason = msg.str();
  return rep;
}

GlobalSurvivalReport classify_global_finite(const std::shared_ptr<const BRWModel>& model) {
  if (!model->is_finite())
    throw DomainError("global classification needs a finite model; project first");
  GlobalSurvivalReport rep;
  MomentKernel kernel(model);
  int radius = static_cast<int>(model->generated_count()) + 1;
  DigraphAnalysis a = analyze_digraph(kernel, model->root(), radius);

  // classes reachable from the root's class in the condensation
  int root_cls = a.class_of_vertex(model->root());
  std::vector<char> seen(a.members.size(), 0);
  std::deque<int> q{root_cls};
  seen[static_cast<std::size_t>(root_cls)] = 1;
  double growth = 0.0;
  while (!q.empty()) {
    int c = q.front();
    q.pop_front();
    if (a.period[static_cast<std::size_t>(c)] > 0)
      growth = std::max(growth, class_perron(kernel, a, c).value);
    for (int child : a.class_children[static_cast<std::size_t>(c)]) {
      if (!seen[static_cast<std::size_t>(child)]) {
        seen[static_cast<std::size_t>(child)] = 1;
        q.push_back(child);
      }
    }
  }
  rep.growth = growth;

  const double tol = 1e-9;
  std::ostringstream msg;
  if (growth > 1.0 + tol) {
    rep.verdict = Verdict::Survives;
    msg << "largest reachable class spectral radius " << growth << " exceeds one";
  } else if (growth < 1.0 - tol) {
    rep.verdict = Verdict::Dies;
    msg << "every reachable class is subcritical (largest spectral radius " << growth << ")";
  } else {
    rep.verdict = Verdict::Dies;
    msg << "largest reachable class spectral radius is critical; the population dies out "
           "at the critical value";
  }
  rep.reason = msg.str();
  if (model->time_kind() == TimeKind::ContinuousCounterpart && growth > 0.0)
    rep.critical_intensity = model->lambda() / growth;
  return rep;
}

}  // namespace brw
