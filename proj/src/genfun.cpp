#include "brwlab/genfun.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <variant>

namespace brw {

namespace {

// Window-resolved site laws: children are window positions (-1 = outside), so
// fixed-point sweeps touch no hash tables.
struct CExplicit {
  struct Outcome {
    double p;
    std::vector<std::pair<int, std::int64_t>> entries;  // (position or -1, count)
  };
  std::vector<Outcome> outcomes;
};
struct CDiffusion {
  bool geometric = false;
  double mean = 0.0;                                  // geometric mean
  std::vector<std::pair<std::int64_t, double>> pmf;   // finite count law
  std::vector<std::pair<int, double>> placement;      // (position or -1, prob)
};
using CSite = std::variant<CExplicit, CDiffusion>;

struct SweepCtx {
  const Window* w = nullptr;
  std::vector<char> active;       // law generated, value iterated
  std::vector<CSite> sites;       // parallel to window (empty variant for inactive)
  double outside = 0.0;
};

double powi(double base, std::int64_t e) {
  if (e == 1) return base;
  if (e < 16) {
    double r = 1.0;
    for (std::int64_t i = 0; i < e; ++i) r *= base;
    return r;
  }
  return std::pow(base, static_cast<double>(e));
}

double eval_compiled(const CSite& site, const std::vector<double>& z, double outside) {
  if (const auto* e = std::get_if<CExplicit>(&site)) {
    double g = 0.0;
    for (const auto& o : e->outcomes) {
      double term = o.p;
      for (const auto& [pos, c] : o.entries) {
        double v = pos >= 0 ? z[pos] : outside;
        term *= powi(v, c);
        if (term == 0.0) break;
      }
      g += term;
    }
    return g;
  }
  const auto& d = std::get<CDiffusion>(site);
  double s = 0.0;
  for (const auto& [pos, p] : d.placement) s += p * (pos >= 0 ? z[pos] : outside);
  if (d.geometric) return 1.0 / (1.0 + d.mean * (1.0 - s));
  double g = 0.0;
  for (const auto& [k, p] : d.pmf) g += p * (k == 0 ? 1.0 : powi(s, k));
  return g;
}

CSite compile_site(const SiteLaw& law, const Window& w) {
  if (const auto* e = law.as_explicit()) {
    CExplicit out;
    for (const auto& [cfg, p] : e->outcomes) {
      CExplicit::Outcome o;
      o.p = p;
      for (const auto& [child, c] : cfg.counts) o.entries.push_back({w.index_of(child), c});
      out.outcomes.push_back(std::move(o));
    }
    return out;
  }
  const auto* d = law.as_diffusion();
  CDiffusion out;
  if (std::holds_alternative<GeometricCountLaw>(d->count)) {
    out.geometric = true;
    out.mean = std::get<GeometricCountLaw>(d->count).mean;
  } else {
    out.pmf = std::get<FiniteCountLaw>(d->count).pmf;
  }
  for (const auto& [child, p] : d->placement) out.placement.push_back({w.index_of(child), p});
  return out;
}

SweepCtx compile(const BRWModel& model, const Window& w, double outside) {
  SweepCtx ctx;
  ctx.w = &w;
  ctx.outside = outside;
  ctx.active.assign(w.size(), 0);
  ctx.sites.resize(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!model.is_finite() && w.dist[i] >= w.radius) continue;  // frontier
    ctx.sites[i] = compile_site(model.law(w.verts[i]), w);
    ctx.active[i] = 1;
  }
  return ctx;
}

enum class Direction { Ascending, Descending };

// Monotone fixed-point sweep. `pinned` coordinates keep their initial value.
// `slack` is how far a step may run against the expected direction; warm
// starts inherit the convergence tolerance of their initializer.
FixedPointResult iterate(const SweepCtx& ctx, std::vector<double> z, Direction dir,
                         const std::vector<char>& pinned, const IterOptions& opt,
                         const char* what, double slack = 1e-12) {
  FixedPointResult res;
  const std::size_t n = z.size();
  std::vector<double> next = z;
  for (long iter = 1; iter <= opt.max_iters; ++iter) {
    double residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!ctx.active[i] || pinned[i]) continue;
      double v = eval_compiled(ctx.sites[i], z, ctx.outside);
      v = std::min(1.0, std::max(0.0, v));
      double delta = v - z[i];
      if (dir == Direction::Ascending ? delta < -slack : delta > slack) {
        std::ostringstream msg;
        msg << what << ": monotone sweep violated at '" << ctx.w->model->label(ctx.w->verts[i])
            << "' (step " << delta << ")";
        throw DomainError(msg.str());
      }
      residual = std::max(residual, std::fabs(delta));
      next[i] = v;
    }
    z.swap(next);
    res.iterations = iter;
    res.residual = residual;
    if (residual < opt.tol) {
      res.converged = true;
      break;
    }
  }
  res.values = std::move(z);
  return res;
}

std::vector<char> no_pins(std::size_t n) { return std::vector<char>(n, 0); }

double hat(double z, double q, double tol = 1e-9) {
  if (q >= 1.0 - tol) return 1.0;
  return (z - q) / (1.0 - q);
}

}  // namespace

double eval_G(const BRWModel& model, VertexId x, const Window& w, const std::vector<double>& z,
              double outside) {
  CSite site = compile_site(model.law(x), w);
  return eval_compiled(site, z, outside);
}

double eval_H(const MomentKernel& kernel, VertexId x, const Window& w,
              const std::vector<double>& z, double outside) {
  const SiteLaw& law = kernel.model().law(x);
  const auto* d = law.as_diffusion();
  if (!d || !std::holds_alternative<GeometricCountLaw>(d->count))
    throw DomainError("H form needs a geometric-count site");
  double mean = d->mean_children;
  double mz = 0.0;
  for (const auto& [child, m] : kernel.row(x).entries) {
    int pos = w.index_of(child);
    mz += m * (pos >= 0 ? z[pos] : outside);
  }
  int px = w.index_of(x);
  double zx = px >= 0 ? z[px] : outside;
  return zx * mz / (1.0 + mean) + 1.0 / (1.0 + mean);
}

ExtinctionBracket global_extinction_bracket(std::shared_ptr<const BRWModel> model, int radius,
                                            const IterOptions& opt) {
  ExtinctionBracket b;
  b.window = make_ball(model, model->root(), radius);
  b.quantity = "global-extinction";
  const std::size_t n = b.window.size();
  for (BoundaryPolicy pol : {BoundaryPolicy::PinZero, BoundaryPolicy::PinOne}) {
    SweepCtx ctx = compile(*model, b.window, boundary_value(pol));
    std::vector<double> z0(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      if (!ctx.active[i]) z0[i] = ctx.outside;  // frontier carries the policy value
    auto res = iterate(ctx, std::move(z0), Direction::Ascending, no_pins(n), opt,
                       "global extinction");
    (pol == BoundaryPolicy::PinZero ? b.lower : b.upper) = std::move(res);
  }
  return b;
}

namespace {

// Shared by never-hit and local extinction: window around A[0], A checked to
// be interior enough to have laws.
Window window_for_target(const std::shared_ptr<const BRWModel>& model,
                         const std::vector<VertexId>& A, int radius) {
  if (A.empty()) throw DomainError("target set must not be empty");
  Window w = make_ball(model, A[0], radius);
  for (VertexId a : A) {
    int i = w.index_of(a);
    if (i < 0) throw DomainError("target vertex '" + model->label(a) + "' outside the window");
    if (!model->is_finite() && w.dist[i] >= w.radius)
      throw DomainError("target vertex '" + model->label(a) + "' lies on the window frontier");
  }
  return w;
}

FixedPointResult never_hit_one_policy(const BRWModel& model, const Window& w,
                                      const std::vector<VertexId>& A, BoundaryPolicy pol,
                                      const IterOptions& opt) {
  SweepCtx ctx = compile(model, w, boundary_value(pol));
  const std::size_t n = w.size();
  std::vector<char> pins(n, 0);
  std::vector<double> z0(n, 1.0);
  for (VertexId a : A) {
    int i = w.index_of(a);
    pins[i] = 1;
    z0[i] = 0.0;
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!ctx.active[i]) z0[i] = ctx.outside;
  auto res = iterate(ctx, std::move(z0), Direction::Descending, pins, opt, "never-hit");
  // Report the target coordinates with their probabilistic meaning: the
  // chance that no particle returns to A starting from a in A.
  for (VertexId a : A) {
    int i = w.index_of(a);
    res.values[i] = eval_compiled(ctx.sites[i], res.values, ctx.outside);
  }
  return res;
}

}  // namespace

ExtinctionBracket never_hit_bracket(std::shared_ptr<const BRWModel> model,
                                    const std::vector<VertexId>& A, int radius,
                                    const IterOptions& opt) {
  ExtinctionBracket b;
  b.window = window_for_target(model, A, radius);
  b.A = A;
  b.quantity = "never-hit";
  b.lower = never_hit_one_policy(*model, b.window, A, BoundaryPolicy::PinZero, opt);
  b.upper = never_hit_one_policy(*model, b.window, A, BoundaryPolicy::PinOne, opt);
  return b;
}

LocalExtinctionResult local_extinction_vector(std::shared_ptr<const BRWModel> model,
                                              const std::vector<VertexId>& A, int radius,
                                              const IterOptions& opt) {
  LocalExtinctionResult out;
  out.never_hit = never_hit_bracket(model, A, radius, opt);
  out.q.window = out.never_hit.window;
  out.q.A = A;
  out.q.quantity = "local-extinction";
  const Window& w = out.q.window;
  const std::size_t n = w.size();
  for (BoundaryPolicy pol : {BoundaryPolicy::PinZero, BoundaryPolicy::PinOne}) {
    SweepCtx ctx = compile(*model, w, boundary_value(pol));
    const FixedPointResult& init =
        pol == BoundaryPolicy::PinZero ? out.never_hit.lower : out.never_hit.upper;
    std::vector<double> z0 = init.values;
    for (std::size_t i = 0; i < n; ++i)
      if (!ctx.active[i]) z0[i] = ctx.outside;
    double slack = std::max(1e-12, 10.0 * (opt.tol + init.residual));
    auto res = iterate(ctx, std::move(z0), Direction::Ascending, no_pins(n), opt,
                       "local extinction", slack);
    res.iterations += init.iterations;
    (pol == BoundaryPolicy::PinZero ? out.q.lower : out.q.upper) = std::move(res);
  }
  {
    SweepCtx ctx = compile(*model, w, boundary_value(BoundaryPolicy::PinOne));
    std::vector<double> z0(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      if (!ctx.active[i]) z0[i] = ctx.outside;
    out.from_zero =
        iterate(ctx, std::move(z0), Direction::Ascending, no_pins(n), opt, "all-zero start");
  }
  return out;
}

NoDeathTransform nodeath_generating_function(std::shared_ptr<const BRWModel> model, int radius,
                                             BoundaryPolicy policy, const IterOptions& opt) {
  NoDeathTransform t;
  auto bracket = global_extinction_bracket(model, radius, opt);
  t.window = bracket.window;
  t.qbar = policy == BoundaryPolicy::PinOne ? bracket.upper.values : bracket.lower.values;
  t.qbar_outside = boundary_value(policy);
  t.model = model;
  t.defined.assign(t.qbar.size(), 1);
  for (std::size_t i = 0; i < t.qbar.size(); ++i)
    if (t.qbar[i] >= 1.0 - 1e-9) t.defined[i] = 0;
  return t;
}

double NoDeathTransform::eval(VertexId x, const std::vector<double>& zhat,
                              double outside_hat) const {
  int px = window.index_of(x);
  if (px < 0) throw DomainError("vertex outside the transform window");
  if (!defined[px]) throw DomainError("conjugation undefined where extinction is certain");
  std::vector<double> z(window.size());
  for (std::size_t i = 0; i < window.size(); ++i) z[i] = qbar[i] + zhat[i] * (1.0 - qbar[i]);
  double outside = qbar_outside + outside_hat * (1.0 - qbar_outside);
  double g = eval_G(*model, x, window, z, outside);
  return (g - qbar[px]) / (1.0 - qbar[px]);
}

std::vector<char> interior_mask(const BRWModel& model, const Window& w) {
  std::vector<char> interior(w.size(), 0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!model.is_finite() && w.dist[i] >= w.radius) continue;
    const SiteLaw& law = model.law(w.verts[i]);
    bool ok = true;
    auto check = [&](VertexId child) {
      int j = w.index_of(child);
      if (j < 0 || (!model.is_finite() && w.dist[j] >= w.radius)) ok = false;
    };
    if (const auto* e = law.as_explicit()) {
      for (const auto& [cfg, p] : e->outcomes) {
        (void)p;
        for (const auto& [child, c] : cfg.counts) {
          (void)c;
          check(child);
        }
      }
    } else if (const auto* d = law.as_diffusion()) {
      for (const auto& [child, p] : d->placement) {
        (void)p;
        check(child);
      }
    }
    interior[i] = ok ? 1 : 0;
  }
  return interior;
}

MaxPrincipleResult maximum_principle_check(const std::shared_ptr<const BRWModel>& model,
                                           const Window& w, const std::vector<double>& z,
                                           const std::vector<double>& qbar, double tol) {
  MaxPrincipleResult res;
  if (z.size() != w.size() || qbar.size() != w.size())
    throw DomainError("value vectors must match the window");
  std::vector<char> interior = interior_mask(*model, w);

  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!interior[i]) continue;
    if (z[i] < qbar[i] - 1e-7) {
      res.precondition_ok = false;
      res.precondition_msg = "z < extinction vector at '" + model->label(w.verts[i]) + "'";
      return res;
    }
    double g = eval_G(*model, w.verts[i], w, z, 0.0);
    if (g < z[i] - 1e-7) {
      res.precondition_ok = false;
      res.precondition_msg = "G(z) < z at '" + model->label(w.verts[i]) + "'";
      return res;
    }
  }
  res.precondition_ok = true;

  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!interior[i]) continue;
    const SiteLaw& law = model->law(w.verts[i]);
    double zi = hat(z[i], qbar[i]);
    double mx = -kInf, mn = kInf;
    auto visit = [&](VertexId child) {
      int j = w.index_of(child);
      double zj = hat(z[j], qbar[j]);
      mx = std::max(mx, zj);
      mn = std::min(mn, zj);
    };
    if (const auto* e = law.as_explicit()) {
      for (const auto& [cfg, p] : e->outcomes) {
        (void)p;
        for (const auto& [child, c] : cfg.counts) {
          (void)c;
          visit(child);
        }
      }
    } else if (const auto* d = law.as_diffusion()) {
      for (const auto& [child, p] : d->placement) {
        (void)p;
        visit(child);
      }
    }
    if (mx == -kInf) continue;  // no children at all
    bool strict_max = mx < zi - tol;
    bool no_bigger_some_smaller = mx <= zi + tol && mn < zi - tol;
    if (strict_max || no_bigger_some_smaller)
      res.violations.push_back({w.verts[i], zi, mx, mn});
  }
  res.holds = res.violations.empty();
  return res;
}

MVCertificateResult mv_certificate_check(const std::shared_ptr<const BRWModel>& model,
                                         const Window& w, const std::vector<VertexId>& A,
                                         const std::vector<double>& v,
                                         const std::vector<double>& qbar_lower,
                                         const std::vector<double>& qbar_upper,
                                         double growth_tol, double domain_tol) {
  MVCertificateResult res;
  if (v.size() != w.size() || qbar_lower.size() != w.size() || qbar_upper.size() != w.size())
    throw DomainError("value vectors must match the window");
  std::vector<char> in_A(w.size(), 0);
  for (VertexId a : A) {
    int i = w.index_of(a);
    if (i < 0) throw DomainError("target vertex outside the window");
    in_A[i] = 1;
  }
  std::vector<char> interior = interior_mask(*model, w);
  std::vector<char> active(w.size(), 1);
  for (std::size_t i = 0; i < w.size(); ++i)
    if (!model->is_finite() && w.dist[i] >= w.radius) active[i] = 0;

  // Domain: away from A the witness must dominate the certified lower bound
  // on extinction (and stay below one).
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!active[i] || in_A[i]) continue;
    if (v[i] < qbar_lower[i] - domain_tol || v[i] > 1.0 + domain_tol) {
      res.status = CertificateStatus::FailedDomain;
      res.failing = w.verts[i];
      std::ostringstream msg;
      msg << "witness below the extinction lower bound at '" << model->label(w.verts[i])
          << "' (v=" << v[i] << ", bound=" << qbar_lower[i] << ")";
      res.detail = msg.str();
      return res;
    }
  }

  res.min_growth_slack = kInf;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!interior[i] || in_A[i]) continue;
    double slack = eval_G(*model, w.verts[i], w, v, 0.0) - v[i];
    if (slack < res.min_growth_slack) {
      res.min_growth_slack = slack;
      if (slack < -growth_tol) res.failing = w.verts[i];
    }
  }
  if (res.min_growth_slack < -growth_tol) {
    res.status = CertificateStatus::FailedGrowth;
    res.detail = "G(v) < v at '" + model->label(res.failing) + "'";
    return res;
  }

  double best = -kInf;
  VertexId best_x = kNoVertex;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!active[i] || in_A[i]) continue;
    // Where the upper extinction bound reaches one the conjugated value is
    // unbounded below, so such coordinates cannot witness separation.
    if (qbar_upper[i] >= 1.0 - 1e-9) continue;
    double tau = hat(v[i], qbar_upper[i]);
    if (tau > best) {
      best = tau;
      best_x = w.verts[i];
    }
  }
  if (best_x == kNoVertex) {
    res.status = CertificateStatus::FailedSeparation;
    res.detail = "conjugation degenerate at every coordinate off the target set";
    return res;
  }
  double worst_A = -kInf;
  for (VertexId a : A) {
    int i = w.index_of(a);
    worst_A = std::max(worst_A, hat(v[i], qbar_lower[i]));
  }
  res.separation = best - worst_A;
  res.witness = best_x;
  if (!(res.separation > growth_tol)) {
    res.status = CertificateStatus::FailedSeparation;
    std::ostringstream msg;
    msg << "no coordinate separates from the target set (gap " << res.separation << ")";
    res.detail = msg.str();
    return res;
  }
  res.status = CertificateStatus::Verified;
  std::ostringstream msg;
  msg << "verified with x0='" << model->label(best_x) << "', separation " << res.separation
      << ", growth slack " << res.min_growth_slack;
  res.detail = msg.str();
  return res;
}

std::string extinction_to_json(const ExtinctionBracket& b) {
  std::ostringstream out;
  char buf[64];
  auto num = [&buf](double x) {
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return std::string(buf);
  };
  out << "{\n  \"quantity\": \"" << b.quantity << "\",\n  \"A\": [";
  for (std::size_t i = 0; i < b.A.size(); ++i)
    out << (i ? ", " : "") << "\"" << b.window.model->label(b.A[i]) << "\"";
  out << "],\n  \"radius\": " << b.window.radius << ",\n  \"results\": [\n";
  const FixedPointResult* runs[2] = {&b.lower, &b.upper};
  const char* names[2] = {"pin-0", "pin-1"};
  for (int r = 0; r < 2; ++r) {
    out << "    {\"policy\": \"" << names[r] << "\", \"residual\": " << num(runs[r]->residual)
        << ", \"iterations\": " << runs[r]->iterations << ", \"values\": {";
    for (std::size_t i = 0; i < b.window.size(); ++i) {
      if (i) out << ", ";
      out << "\"" << b.window.model->label(b.window.verts[i]) << "\": " << num(runs[r]->values[i]);
    }
    out << "}}" << (r == 0 ? "," : "") << "\n";
  }
  out << "  ]\n}\n";
  return out.str();
}

std::string extinction_to_csv(const ExtinctionBracket& b) {
  std::ostringstream out;
  out << "vertex,label,lower,upper\n";
  char buf[64];
  for (std::size_t i = 0; i < b.window.size(); ++i) {
    std::string label = b.window.model->label(b.window.verts[i]);
    if (label.find_first_of(",\"\n") != std::string::npos) {
      std::string q = "\"";
      for (char c : label) {
        if (c == '"') q += "\"\"";
        else q += c;
      }
      label = q + "\"";
    }
    out << b.window.verts[i] << "," << label << ",";
    std::snprintf(buf, sizeof(buf), "%.17g", b.lower.values[i]);
    out << buf << ",";
    std::snprintf(buf, sizeof(buf), "%.17g", b.upper.values[i]);
    out << buf << "\n";
  }
  return out.str();
}

}  // namespace brw
