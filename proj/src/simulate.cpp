#include "brwlab/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>
#include <thread>
#include <utility>

namespace brw {

namespace {

void check_plan(const TrialPlan& plan) {
  if (plan.horizon < 0) throw DomainError("horizon must be nonnegative");
  if (plan.horizon >= (1 << 16)) throw DomainError("horizon exceeds the stream layout");
  if (plan.population_cap < 1) throw DomainError("population cap must be positive");
  if (plan.truncation != kNoTruncation && plan.truncation < 1)
    throw DomainError("truncation level must be positive");
}

void clamp_counts(Occupancy& o, std::int64_t cap) {
  if (cap == kNoTruncation) return;
  for (auto& [v, c] : o)
    if (c > cap) c = cap;
}

// One sampled offspring configuration, shared across coupled variants.
OffspringConfig sample_offspring(const SiteLaw& law, RngStream& rng) {
  if (const ExplicitSiteLaw* e = law.as_explicit())
    return e->outcomes[e->pick.sample(rng)].first;

  const DiffusionSiteLaw* d = law.as_diffusion();
  std::int64_t n = 0;
  if (const auto* f = std::get_if<FiniteCountLaw>(&d->count))
    n = f->pmf[d->count_pick.sample(rng)].first;
  else
    n = rng.next_geometric(std::get<GeometricCountLaw>(d->count).mean);

  OffspringConfig cfg;
  for (std::int64_t i = 0; i < n; ++i) {
    VertexId site = d->placement[d->place.sample(rng)].first;
    bool found = false;
    for (auto& [v, c] : cfg.counts)
      if (v == site) {
        ++c;
        found = true;
        break;
      }
    if (!found) cfg.counts.push_back({site, 1});
  }
  return cfg;
}

// Restrained reproduction: children one at a time, each kept with probability
// accept(occupancy built so far at its site). Draw order per child is
// placement then acceptance, so the stream advances deterministically.
void spawn_accepted(const SiteLaw& law, RngStream& rng,
                    const std::function<double(std::int64_t)>& accept, Occupancy& acc) {
  auto place = [&](VertexId site) {
    auto it = acc.find(site);
    std::int64_t k = it == acc.end() ? 0 : it->second;
    double u = rng.next_unit();
    if (u < accept(k)) {
      if (it == acc.end())
        acc.emplace(site, 1);
      else
        ++it->second;
    }
  };
  if (const ExplicitSiteLaw* e = law.as_explicit()) {
    const OffspringConfig& cfg = e->outcomes[e->pick.sample(rng)].first;
    for (const auto& [site, c] : cfg.counts)
      for (std::int64_t i = 0; i < c; ++i) place(site);
    return;
  }
  const DiffusionSiteLaw* d = law.as_diffusion();
  std::int64_t n = 0;
  if (const auto* f = std::get_if<FiniteCountLaw>(&d->count))
    n = f->pmf[d->count_pick.sample(rng)].first;
  else
    n = rng.next_geometric(std::get<GeometricCountLaw>(d->count).mean);
  for (std::int64_t i = 0; i < n; ++i) place(d->placement[d->place.sample(rng)].first);
}

struct Variant {
  std::int64_t cap = kNoTruncation;
  Occupancy cur, next;
  SimOutcome out;
  bool running = true;
};

// Runs all truncation levels of one trial on shared randomness. A single
// level with an acceptance function is the restrained variant; several
// levels require plain dynamics so the domination argument applies.
std::vector<SimOutcome> simulate_levels(const BRWModel& m, const Occupancy& initial,
                                        const TrialPlan& plan, std::int64_t trial,
                                        const std::vector<std::int64_t>& levels) {
  check_plan(plan);
  if (levels.empty()) throw DomainError("need at least one truncation level");
  if (plan.accept && levels.size() > 1)
    throw DomainError("coupled truncation needs plain dynamics, not an acceptance function");

  std::vector<Variant> vars(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) {
    Variant& v = vars[i];
    v.cap = levels[i];
    for (const auto& [s, c] : initial) {
      if (c < 0) throw DomainError("negative particle count in the initial state");
      if (c > 0) v.cur[s] = c;
    }
    clamp_counts(v.cur, v.cap);
    v.out.targets.resize(plan.targets.size());
  }

  auto note_state = [&](Variant& v, int gen) {
    std::int64_t tot = 0;
    for (const auto& [s, c] : v.cur) tot += c;
    if (tot > v.out.max_population) v.out.max_population = tot;
    for (std::size_t t = 0; t < plan.targets.size(); ++t) {
      std::int64_t occ = 0;
      for (VertexId s : plan.targets[t]) {
        auto it = v.cur.find(s);
        if (it != v.cur.end()) occ += it->second;
      }
      if (occ > 0) {
        TargetVisits& tv = v.out.targets[t];
        if (tv.first_visit < 0) tv.first_visit = gen;
        tv.last_visit = gen;
        tv.total += occ;
      }
    }
    return tot;
  };
  auto finish = [&](Variant& v, StopReason r, int gen) {
    v.running = false;
    v.out.stop = r;
    v.out.final_generation = gen;
    v.out.final_counts = v.cur;
  };

  for (Variant& v : vars) {
    std::int64_t tot = note_state(v, 0);
    if (tot == 0)
      finish(v, StopReason::Extinct, 0);
    else if (tot > plan.population_cap)
      finish(v, StopReason::PopulationCap, 0);
  }

  // (label pointer, id) pairs; label order keeps the restrained sequence and
  // any tie-breaking independent of the order lazy vertices were interned in.
  std::vector<std::pair<const std::string*, VertexId>> sites;
  std::vector<std::int64_t> have(vars.size());

  for (int gen = 0; gen < plan.horizon; ++gen) {
    bool any = false;
    for (const Variant& v : vars) any = any || v.running;
    if (!any) break;

    sites.clear();
    {
      std::set<VertexId> seen;
      for (const Variant& v : vars)
        if (v.running)
          for (const auto& [s, c] : v.cur) seen.insert(s);
      for (VertexId s : seen) sites.push_back({&m.label(s), s});
      std::sort(sites.begin(), sites.end(),
                [](const auto& a, const auto& b) { return *a.first < *b.first; });
    }

    for (Variant& v : vars) v.next.clear();
    for (const auto& [lab, y] : sites) {
      (void)lab;
      std::int64_t needed = 0;
      for (std::size_t i = 0; i < vars.size(); ++i) {
        have[i] = 0;
        if (!vars[i].running) continue;
        auto it = vars[i].cur.find(y);
        if (it != vars[i].cur.end()) have[i] = it->second;
        if (have[i] > needed) needed = have[i];
      }
      if (needed == 0) continue;
      if (!m.law_available(y)) {
        // a particle would have to branch outside the generated ball
        for (std::size_t i = 0; i < vars.size(); ++i)
          if (vars[i].running && have[i] > 0) finish(vars[i], StopReason::EscapedBall, gen);
        continue;
      }
      const SiteLaw& law = m.law(y);
      std::uint64_t key = m.site_key(y);
      for (std::int64_t j = 0; j < needed; ++j) {
        RngStream rng(plan.master_seed, static_cast<std::uint64_t>(trial),
                      static_cast<std::uint64_t>(gen), key, static_cast<std::uint64_t>(j));
        if (plan.accept) {
          spawn_accepted(law, rng, plan.accept, vars[0].next);
        } else {
          OffspringConfig cfg = sample_offspring(law, rng);
          for (std::size_t i = 0; i < vars.size(); ++i) {
            if (!vars[i].running || have[i] <= j) continue;
            for (const auto& [s, c] : cfg.counts) vars[i].next[s] += c;
          }
        }
      }
    }

    for (Variant& v : vars) {
      if (!v.running) continue;
      clamp_counts(v.next, v.cap);
      v.cur = std::move(v.next);
      v.next = Occupancy();
      std::int64_t tot = note_state(v, gen + 1);
      if (tot == 0)
        finish(v, StopReason::Extinct, gen + 1);
      else if (tot > plan.population_cap)
        finish(v, StopReason::PopulationCap, gen + 1);
    }

    // eta^m <= eta^{m'} pointwise for adjacent ascending levels
    for (std::size_t i = 0; i + 1 < vars.size(); ++i) {
      const Variant& lo = vars[i];
      const Variant& hi = vars[i + 1];
      if (!lo.running || !hi.running) continue;
      for (const auto& [s, c] : lo.cur) {
        auto it = hi.cur.find(s);
        std::int64_t hc = it == hi.cur.end() ? 0 : it->second;
        if (c > hc)
          throw std::logic_error("truncation coupling violated at site '" + m.label(s) +
                                 "' in generation " + std::to_string(gen + 1) + " of trial " +
                                 std::to_string(trial));
      }
    }
  }

  for (Variant& v : vars)
    if (v.running) finish(v, StopReason::Horizon, plan.horizon);
  std::vector<SimOutcome> out;
  out.reserve(vars.size());
  for (Variant& v : vars) out.push_back(std::move(v.out));
  return out;
}

// Splits trial indices over plan.workers threads; results land in per-trial
// slots, so the aggregate does not depend on scheduling.
void for_each_trial(const TrialPlan& plan, const std::function<void(std::int64_t)>& body) {
  if (plan.trials < 1) throw DomainError("plan needs at least one trial");
  if (plan.workers < 1) throw DomainError("worker count must be positive");
  int workers = static_cast<int>(std::min<std::int64_t>(plan.workers, plan.trials));
  if (workers == 1) {
    for (std::int64_t t = 0; t < plan.trials; ++t) body(t);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::int64_t t = w; t < plan.trials; t += workers) body(t);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

const char* stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::Extinct: return "extinct";
    case StopReason::Horizon: return "horizon";
    case StopReason::PopulationCap: return "population-cap";
    case StopReason::EscapedBall: return "escaped-ball";
  }
  return "?";
}

const char* survival_mode_name(SurvivalMode m) {
  switch (m) {
    case SurvivalMode::Global: return "global";
    case SurvivalMode::LocalAt: return "local";
    case SurvivalMode::StrongLocalAt: return "strong-local";
  }
  return "?";
}

SimOutcome run_trial(const std::shared_ptr<const BRWModel>& model, const Occupancy& initial,
                     const TrialPlan& plan, std::int64_t trial_index) {
  return std::move(simulate_levels(*model, initial, plan, trial_index, {plan.truncation})[0]);
}

std::vector<SimOutcome> run_trials(const std::shared_ptr<const BRWModel>& model, VertexId start,
                                   const TrialPlan& plan) {
  std::vector<SimOutcome> out(static_cast<std::size_t>(plan.trials));
  Occupancy init{{start, 1}};
  const BRWModel& m = *model;
  for_each_trial(plan, [&](std::int64_t t) {
    out[static_cast<std::size_t>(t)] =
        std::move(simulate_levels(m, init, plan, t, {plan.truncation})[0]);
  });
  return out;
}

WilsonInterval wilson_interval(std::int64_t successes, std::int64_t trials) {
  if (trials < 1) throw DomainError("interval needs at least one trial");
  if (successes < 0 || successes > trials) throw DomainError("successes out of range");
  constexpr double z = 1.959963984540054;  // 97.5% normal quantile
  double n = static_cast<double>(trials);
  double p = static_cast<double>(successes) / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (p + z2 / (2.0 * n)) / denom;
  double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  WilsonInterval w;
  w.successes = successes;
  w.trials = trials;
  w.estimate = p;
  // exact endpoints at the boundaries; center - half only cancels in theory
  w.lower = successes == 0 ? 0.0 : std::max(0.0, center - half);
  w.upper = successes == trials ? 1.0 : std::min(1.0, center + half);
  return w;
}

SurvivalEstimate estimate_survival(const std::shared_ptr<const BRWModel>& model, VertexId start,
                                   const TrialPlan& plan, SurvivalMode mode) {
  if (mode != SurvivalMode::Global && plan.targets.empty())
    throw DomainError("local survival estimates need a target set in the plan");
  std::vector<SimOutcome> outs = run_trials(model, start, plan);

  SurvivalEstimate e;
  e.mode = mode;
  e.quarter_start = (3 * plan.horizon) / 4;
  for (const SimOutcome& o : outs) switch (o.stop) {
      case StopReason::Extinct: ++e.extinct; break;
      case StopReason::Horizon: ++e.at_horizon; break;
      case StopReason::PopulationCap: ++e.capped; break;
      case StopReason::EscapedBall: ++e.escaped; break;
    }
  std::int64_t alive = e.at_horizon + e.capped + e.escaped;
  e.censored_fraction =
      alive > 0 ? static_cast<double>(e.capped + e.escaped) / static_cast<double>(alive) : 0.0;

  auto visited = [&](const SimOutcome& o) {
    return !o.targets.empty() && o.targets[0].last_visit >= e.quarter_start;
  };
  auto alive_out = [](const SimOutcome& o) { return o.stop != StopReason::Extinct; };

  switch (mode) {
    case SurvivalMode::Global:
      e.ci = wilson_interval(alive, plan.trials);
      break;
    case SurvivalMode::LocalAt: {
      std::int64_t s = std::count_if(outs.begin(), outs.end(), visited);
      e.ci = wilson_interval(s, plan.trials);
      break;
    }
    case SurvivalMode::StrongLocalAt: {
      if (alive == 0) throw DomainError("no surviving trials to condition on");
      std::int64_t s = 0;
      for (const SimOutcome& o : outs)
        if (alive_out(o) && visited(o)) ++s;
      e.ci = wilson_interval(s, alive);
      break;
    }
  }
  return e;
}

TruncationSweepResult coupled_truncation_sweep(const std::shared_ptr<const BRWModel>& model,
                                               VertexId start, const TrialPlan& plan,
                                               const std::vector<std::int64_t>& levels) {
  if (levels.empty()) throw DomainError("sweep needs at least one truncation level");
  if (plan.accept)
    throw DomainError("coupled truncation needs plain dynamics, not an acceptance function");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] == kNoTruncation) {
      if (i + 1 != levels.size()) throw DomainError("the no-truncation level must come last");
    } else if (levels[i] < 1) {
      throw DomainError("truncation level must be positive");
    } else if (i > 0 && levels[i] <= levels[i - 1]) {
      throw DomainError("truncation levels must be ascending");
    }
  }

  TruncationSweepResult res;
  res.levels = levels;
  res.outcomes.assign(levels.size(),
                      std::vector<SimOutcome>(static_cast<std::size_t>(plan.trials)));
  Occupancy init{{start, 1}};
  const BRWModel& m = *model;
  for_each_trial(plan, [&](std::int64_t t) {
    std::vector<SimOutcome> outs = simulate_levels(m, init, plan, t, levels);
    for (std::size_t i = 0; i < levels.size(); ++i)
      res.outcomes[i][static_cast<std::size_t>(t)] = std::move(outs[i]);
  });

  res.survival.reserve(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) {
    std::int64_t alive = 0;
    for (const SimOutcome& o : res.outcomes[i])
      if (o.stop != StopReason::Extinct) ++alive;
    res.survival.push_back(wilson_interval(alive, plan.trials));
  }
  return res;
}

std::string trial_csv_header() {
  return "trial,stop_reason,final_generation,max_population,first_visit,last_visit,total_visits";
}

std::string trial_csv_row(std::int64_t trial, const SimOutcome& o) {
  TargetVisits tv;
  if (!o.targets.empty()) tv = o.targets[0];
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%lld,%s,%d,%lld,%lld,%lld,%lld",
                static_cast<long long>(trial), stop_reason_name(o.stop), o.final_generation,
                static_cast<long long>(o.max_population), static_cast<long long>(tv.first_visit),
                static_cast<long long>(tv.last_visit), static_cast<long long>(tv.total));
  return buf;
}

}  // namespace brw
