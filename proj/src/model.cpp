#include "brwlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include "brwlab/digraph.hpp"
#include "brwlab/kernel.hpp"

namespace brw {

namespace {

constexpr double kProbTol = 1e-12;

// Merges duplicate child labels inside one configuration and drops zero
// counts, so builders can emit entries in whatever order is natural.
std::vector<std::pair<std::string, std::int64_t>> canonical_config(
    const std::vector<std::pair<std::string, std::int64_t>>& entries) {
  std::map<std::string, std::int64_t> acc;
  for (const auto& [lbl, c] : entries) {
    if (c < 0) throw ModelError("negative offspring count for child '" + lbl + "'");
    if (c > 0) acc[lbl] += c;
  }
  return {acc.begin(), acc.end()};
}

}  // namespace

BRWModel::BRWModel(const std::string& root_label, LawGenerator gen, ModelOptions opt)
    : opt_(std::move(opt)), gen_(std::move(gen)), finite_(false) {
  if (!gen_) throw ModelError("model needs a law generator");
  if (opt_.cap < 1) throw ModelError("generation cap must be at least 1");
  std::unique_lock lock(mu_);
  intern_locked(root_label, 0);
}

std::shared_ptr<BRWModel> BRWModel::finite(
    const std::string& root_label,
    const std::vector<std::pair<std::string, RawSiteLaw>>& laws, ModelOptions opt) {
  std::map<std::string, const RawSiteLaw*> table;
  for (const auto& [lbl, law] : laws) {
    if (!table.emplace(lbl, &law).second) throw ModelError("duplicate law for vertex '" + lbl + "'");
  }
  if (!table.count(root_label)) throw ModelError("root '" + root_label + "' has no law");

  opt.cap = (1 << 30);
  opt.depth_of = nullptr;
  auto model = std::shared_ptr<BRWModel>(new BRWModel());
  model->opt_ = std::move(opt);
  model->finite_ = true;
  std::map<std::string, RawSiteLaw> copy;
  for (const auto& [lbl, law] : laws) copy.emplace(lbl, law);
  model->gen_ = [copy = std::move(copy)](const std::string& lbl) -> RawSiteLaw {
    auto it = copy.find(lbl);
    if (it == copy.end()) throw ModelError("law references unknown vertex '" + lbl + "'");
    return it->second;
  };

  {
    std::unique_lock lock(model->mu_);
    model->intern_locked(root_label, 0);
    // Breadth-first from the root so ids are stable and depths are true
    // distances; anything not reached is appended afterwards.
    std::deque<VertexId> queue{0};
    while (!queue.empty()) {
      VertexId v = queue.front();
      queue.pop_front();
      std::size_t before = model->sites_.size();
      model->build_law_locked(v);
      for (std::size_t i = before; i < model->sites_.size(); ++i)
        queue.push_back(static_cast<VertexId>(i));
    }
    for (const auto& [lbl, law] : laws) {
      (void)law;
      if (!model->index_.count(lbl)) {
        VertexId v = model->intern_locked(lbl, 0);
        model->build_law_locked(v);
      }
    }
    // Laws of appended vertices may reach back into the graph; make sure
    // every listed vertex ends up with a built law.
    for (std::size_t i = 0; i < model->sites_.size(); ++i)
      model->build_law_locked(static_cast<VertexId>(i));
  }
  return model;
}

std::size_t BRWModel::generated_count() const {
  std::shared_lock lock(mu_);
  return sites_.size();
}

const std::string& BRWModel::label(VertexId v) const {
  std::shared_lock lock(mu_);
  return sites_.at(static_cast<std::size_t>(v))->label;
}

std::uint64_t BRWModel::site_key(VertexId v) const {
  std::shared_lock lock(mu_);
  return sites_.at(static_cast<std::size_t>(v))->key;
}

int BRWModel::depth(VertexId v) const {
  std::shared_lock lock(mu_);
  return sites_.at(static_cast<std::size_t>(v))->depth;
}

std::optional<VertexId> BRWModel::find(const std::string& label) const {
  std::shared_lock lock(mu_);
  auto it = index_.find(label);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

VertexId BRWModel::intern(const std::string& label) const {
  {
    std::shared_lock lock(mu_);
    auto it = index_.find(label);
    if (it != index_.end()) return it->second;
  }
  std::unique_lock lock(mu_);
  return intern_locked(label, -1);
}

VertexId BRWModel::intern_locked(const std::string& label, int depth_hint) const {
  auto it = index_.find(label);
  if (it != index_.end()) return it->second;
  auto site = std::make_unique<Site>();
  site->label = label;
  site->key = fnv1a64(label);
  if (opt_.depth_of) {
    site->depth = opt_.depth_of(label);
    if (site->depth < 0) throw ModelError("builder reported negative depth for '" + label + "'");
  } else {
    site->depth = depth_hint >= 0 ? depth_hint : 0;
  }
  VertexId id = static_cast<VertexId>(sites_.size());
  sites_.push_back(std::move(site));
  index_.emplace(label, id);
  return id;
}

bool BRWModel::law_available(VertexId v) const {
  if (finite_) return true;
  return depth(v) < opt_.cap;
}

const SiteLaw& BRWModel::law(VertexId v) const {
  {
    std::shared_lock lock(mu_);
    const auto& site = sites_.at(static_cast<std::size_t>(v));
    if (site->law) return *site->law;
    if (!finite_ && site->depth >= opt_.cap)
      throw CapExceededError("law of '" + site->label + "' lies at the generation cap (depth " +
                             std::to_string(site->depth) + ", cap " + std::to_string(opt_.cap) + ")");
  }
  std::unique_lock lock(mu_);
  build_law_locked(v);
  return *sites_[static_cast<std::size_t>(v)]->law;
}

void BRWModel::build_law_locked(VertexId v) const {
  Site& site = *sites_.at(static_cast<std::size_t>(v));
  if (site.law) return;
  if (!finite_ && site.depth >= opt_.cap)
    throw CapExceededError("law of '" + site.label + "' lies at the generation cap");
  RawSiteLaw raw = gen_(site.label);
  site.law = std::make_unique<SiteLaw>(resolve_raw_locked(raw, site.depth));
}

SiteLaw BRWModel::resolve_raw_locked(const RawSiteLaw& raw, int parent_depth) const {
  SiteLaw out;
  if (const auto* e = std::get_if<RawExplicitLaw>(&raw)) {
    ExplicitSiteLaw lw;
    double total = 0.0;
    std::vector<double> weights;
    for (const auto& [entries, p] : e->outcomes) {
      if (p < 0.0 || !std::isfinite(p)) throw ModelError("outcome probability must be finite and nonnegative");
      total += p;
      OffspringConfig cfg;
      for (const auto& [lbl, c] : canonical_config(entries))
        cfg.counts.emplace_back(intern_locked(lbl, parent_depth + 1), c);
      lw.outcomes.emplace_back(std::move(cfg), p);
      weights.push_back(p);
    }
    if (std::fabs(total - 1.0) > kProbTol)
      throw ModelError("outcome probabilities sum to " + std::to_string(total));
    lw.pick = AliasTable(weights);
    out.law = std::move(lw);
    return out;
  }
  if (const auto* d = std::get_if<RawDiffusionLaw>(&raw)) {
    DiffusionSiteLaw lw;
    lw.count = d->count;
    double psum = 0.0;
    std::vector<double> weights;
    for (const auto& [lbl, p] : d->placement) {
      if (p < 0.0 || !std::isfinite(p)) throw ModelError("placement probability must be finite and nonnegative");
      if (p == 0.0) continue;
      lw.placement.emplace_back(intern_locked(lbl, parent_depth + 1), p);
      weights.push_back(p);
      psum += p;
    }
    double mean = count_law_mean(lw.count);
    if (mean < 0.0) throw ModelError("count law has negative mean");
    if (mean > 0.0 && std::fabs(psum - 1.0) > kProbTol)
      throw ModelError("placement row sums to " + std::to_string(psum));
    if (const auto* f = std::get_if<FiniteCountLaw>(&lw.count)) {
      double csum = 0.0;
      std::vector<double> cw;
      for (const auto& [k, p] : f->pmf) {
        if (k < 0) throw ModelError("negative child count in count law");
        if (p < 0.0 || !std::isfinite(p)) throw ModelError("count probability must be finite and nonnegative");
        csum += p;
        cw.push_back(p);
      }
      if (std::fabs(csum - 1.0) > kProbTol)
        throw ModelError("count law sums to " + std::to_string(csum));
      lw.count_pick = AliasTable(cw);
    }
    lw.mean_children = mean;
    if (!weights.empty()) lw.place = AliasTable(weights);
    out.law = std::move(lw);
    return out;
  }
  const auto& r = std::get<RawRatesLaw>(raw);
  DiffusionSiteLaw lw;
  lw.from_rates = true;
  double k_total = 0.0;
  std::vector<double> weights;
  for (const auto& [lbl, k] : r.rates) {
    if (k < 0.0 || !std::isfinite(k)) throw ModelError("displacement rate must be finite and nonnegative");
    if (k == 0.0) continue;
    VertexId child = intern_locked(lbl, parent_depth + 1);
    lw.rates.emplace_back(child, k);
    k_total += k;
    weights.push_back(k);
  }
  lw.rate_total = k_total;
  lw.count = GeometricCountLaw{opt_.lambda * k_total};
  lw.mean_children = opt_.lambda * k_total;
  for (const auto& [child, k] : lw.rates) lw.placement.emplace_back(child, k / k_total);
  if (!weights.empty()) lw.place = AliasTable(weights);
  out.law = std::move(lw);
  return out;
}

Window make_ball(std::shared_ptr<const BRWModel> model, VertexId center, int radius) {
  if (radius < 0) throw DomainError("ball radius must be nonnegative");
  Window w;
  w.model = model;
  w.center = center;
  w.radius = radius;

  std::unordered_map<VertexId, int> dist;
  dist[center] = 0;
  std::deque<VertexId> queue{center};
  while (!queue.empty()) {
    VertexId v = queue.front();
    queue.pop_front();
    int d = dist[v];
    if (d >= radius) continue;
    const SiteLaw& law = model->law(v);
    auto touch = [&](VertexId child) {
      if (!dist.count(child)) {
        dist[child] = d + 1;
        queue.push_back(child);
      }
    };
    if (const auto* e = law.as_explicit()) {
      for (const auto& [cfg, p] : e->outcomes) {
        (void)p;
        for (const auto& [child, c] : cfg.counts) {
          (void)c;
          touch(child);
        }
      }
    } else if (const auto* dl = law.as_diffusion()) {
      for (const auto& [child, p] : dl->placement) {
        (void)p;
        touch(child);
      }
    }
  }

  std::vector<std::pair<std::pair<int, std::string>, VertexId>> order;
  order.reserve(dist.size());
  for (const auto& [v, d] : dist) order.push_back({{d, model->label(v)}, v});
  std::sort(order.begin(), order.end());
  w.verts.reserve(order.size());
  w.dist.reserve(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    w.verts.push_back(order[i].second);
    w.dist.push_back(order[i].first.first);
    w.pos.emplace(order[i].second, static_cast<int>(i));
  }
  return w;
}

namespace {

// P(exactly one child lands inside the member set) for one site.
double prob_exactly_one_inside(const SiteLaw& law, const std::set<VertexId>& members) {
  if (const auto* e = law.as_explicit()) {
    double p1 = 0.0;
    for (const auto& [cfg, p] : e->outcomes) {
      std::int64_t inside = 0;
      for (const auto& [v, c] : cfg.counts)
        if (members.count(v)) inside += c;
      if (inside == 1) p1 += p;
    }
    return p1;
  }
  const auto* d = law.as_diffusion();
  double s = 0.0;
  for (const auto& [v, p] : d->placement)
    if (members.count(v)) s += p;
  if (s == 0.0) return 0.0;
  // sum_h P(H = h) * h * s * (1-s)^(h-1)
  if (const auto* f = std::get_if<FiniteCountLaw>(&d->count)) {
    double acc = 0.0;
    for (const auto& [h, p] : f->pmf) {
      if (h == 0) continue;
      acc += p * static_cast<double>(h) * s * std::pow(1.0 - s, static_cast<double>(h - 1));
    }
    return acc;
  }
  double m = std::get<GeometricCountLaw>(d->count).mean;
  // geometric pmf: E[H s (1-s)^(H-1)] = s/(1+m) * sum_h h ((1-s) m/(1+m))^(h-1) (m/(1+m))
  double r = (1.0 - s) * m / (1.0 + m);
  double first = s * m / ((1.0 + m) * (1.0 + m));
  return first / ((1.0 - r) * (1.0 - r));
}

}  // namespace

ValidationReport validate_model(const std::shared_ptr<const BRWModel>& model, int radius) {
  ValidationReport rep;
  auto note = [&rep](ValidationIssue::Severity s, std::string msg) {
    rep.issues.push_back({s, std::move(msg)});
  };

  Window w;
  try {
    w = make_ball(model, model->root(), radius);
  } catch (const CapExceededError& e) {
    note(ValidationIssue::Severity::Fatal,
         std::string("cannot expand validation window: ") + e.what());
    return rep;
  }

  // Law-level checks happen at construction; here we look at row means and at
  // class structure. Rebuild laws defensively so malformed generators surface
  // as fatal issues instead of exceptions.
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w.dist[i] >= radius && !model->is_finite()) continue;  // frontier, no law
    try {
      const SiteLaw& law = model->law(w.verts[i]);
      rep.sup_mean_offspring = std::max(rep.sup_mean_offspring, law.mean_total());
    } catch (const std::exception& e) {
      note(ValidationIssue::Severity::Fatal,
           "law of '" + model->label(w.verts[i]) + "': " + e.what());
    }
  }
  if (!rep.ok()) return rep;
  if (!model->is_finite())
    note(ValidationIssue::Severity::Note,
         "row means checked on the generated window only (sup = " +
             std::to_string(rep.sup_mean_offspring) + ")");

  auto kernel = make_kernel(model);
  DigraphAnalysis an;
  try {
    an = analyze_digraph(*kernel, model->root(), radius);
  } catch (const std::exception& e) {
    note(ValidationIssue::Severity::Fatal, std::string("class analysis failed: ") + e.what());
    return rep;
  }

  for (std::size_t c = 0; c < an.members.size(); ++c) {
    if (an.touches_boundary[c]) {
      note(ValidationIssue::Severity::Note,
           "class of '" + model->label(an.window.verts[an.members[c][0]]) +
               "' touches the window boundary; nonsingularity not checked there");
      continue;
    }
    std::set<VertexId> members;
    for (int idx : an.members[c]) members.insert(an.window.verts[idx]);
    bool ok = false;
    for (int idx : an.members[c]) {
      double p1 = prob_exactly_one_inside(model->law(an.window.verts[idx]), members);
      if (p1 < 1.0 - 1e-12) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      std::ostringstream msg;
      msg << "nonsingularity violated: every vertex of class {";
      bool first = true;
      for (int idx : an.members[c]) {
        if (!first) msg << ", ";
        msg << model->label(an.window.verts[idx]);
        first = false;
      }
      msg << "} has exactly one child inside the class almost surely";
      note(ValidationIssue::Severity::Fatal, msg.str());
    }
  }
  return rep;
}

void validate_or_throw(const std::shared_ptr<const BRWModel>& model, int radius) {
  ValidationReport rep = validate_model(model, radius);
  if (!rep.ok()) {
    std::string msg = "model validation failed:";
    for (const auto& i : rep.issues)
      if (i.severity == ValidationIssue::Severity::Fatal) msg += "\n  " + i.message;
    throw ModelError(msg);
  }
}

}  // namespace brw
