#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "brwlab/genfun.hpp"
#include "brwlab/kernel.hpp"
#include "brwlab/model.hpp"
#include "brwlab/moments.hpp"
#include "brwlab/simulate.hpp"
#include "brwlab/spaces.hpp"

using nlohmann::json;
using namespace brw;

namespace {

struct Instance {
  std::string id;
  json params;
  int radius = 6;
};

std::shared_ptr<BRWModel> build(const Instance& inst) {
  return build_example(inst.id, inst.params);
}

// One Jacobi sweep of z -> G(z) with a pinned outside value.
std::vector<double> sweep(const BRWModel& model, const Window& w, const std::vector<double>& z,
                          double outside) {
  std::vector<double> next(z.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    next[i] = eval_G(model, w.verts[i], w, z, outside);
  return next;
}

}  // namespace

TEST_CASE("fixed point sweeps are monotone from both ends") {
  // ascent from all-zero under pin-0, descent from all-one under pin-1;
  // every iterate stays a probability vector
  std::vector<Instance> instances = {
      {"gw", json{{"pmf", json{{"0", 0.25}, {"2", 0.75}}}}, 2},
      {"two-type-bp", json{{"p", 0.8}, {"rho", json{{"0", 0.25}, {"2", 0.75}}}}, 3},
      {"zd", json{{"d", 1}}, 6},
      {"tree", json{{"d", 3}}, 5},
      {"strip", json{{"p", 0.9}}, 5},
  };
  for (const Instance& inst : instances) {
    CAPTURE(inst.id);
    auto model = build(inst);
    Window w = make_ball(model, model->root(), inst.radius);

    std::vector<double> lo(w.size(), 0.0), hi(w.size(), 1.0);
    for (int it = 0; it < 60; ++it) {
      std::vector<double> lo2 = sweep(*model, w, lo, 0.0);
      std::vector<double> hi2 = sweep(*model, w, hi, 1.0);
      for (std::size_t i = 0; i < w.size(); ++i) {
        REQUIRE(lo2[i] >= lo[i] - 1e-13);
        REQUIRE(hi2[i] <= hi[i] + 1e-13);
        REQUIRE(lo2[i] >= 0.0);
        REQUIRE(hi2[i] <= 1.0);
        REQUIRE(lo2[i] <= hi2[i] + 1e-13);
      }
      lo = std::move(lo2);
      hi = std::move(hi2);
    }
  }
}

TEST_CASE("extinction brackets nest as the window grows") {
  // pin-0 lower rises and pin-1 upper falls with the radius, pointwise on
  // the vertices every window shares
  struct Case {
    Instance inst;
    std::vector<int> radii;
  };
  std::vector<Case> cases = {
      {{"zd", json{{"d", 1}}}, {10, 20, 40}},
      {{"tree", json{{"d", 3}}}, {4, 7, 10}},
      {{"strip", json{{"p", 0.9}}}, {6, 10, 14}},
  };
  for (const Case& c : cases) {
    CAPTURE(c.inst.id);
    auto model = build(c.inst);
    std::vector<ExtinctionBracket> brackets;
    for (int r : c.radii) brackets.push_back(global_extinction_bracket(model, r));
    for (const ExtinctionBracket& b : brackets) {
      REQUIRE(b.lower.converged);
      REQUIRE(b.upper.converged);
      for (std::size_t i = 0; i < b.window.size(); ++i)
        REQUIRE(b.lower.values[i] <= b.upper.values[i] + 1e-8);
    }
    const Window& w0 = brackets.front().window;
    for (std::size_t k = 1; k < brackets.size(); ++k) {
      for (std::size_t i = 0; i < w0.size(); ++i) {
        int prev = brackets[k - 1].window.index_of(w0.verts[i]);
        int next = brackets[k].window.index_of(w0.verts[i]);
        REQUIRE(prev >= 0);
        REQUIRE(next >= 0);
        CHECK(brackets[k].lower.values[static_cast<std::size_t>(next)] >=
              brackets[k - 1].lower.values[static_cast<std::size_t>(prev)] - 1e-8);
        CHECK(brackets[k].upper.values[static_cast<std::size_t>(next)] <=
              brackets[k - 1].upper.values[static_cast<std::size_t>(prev)] + 1e-8);
      }
    }
  }
}

TEST_CASE("global extinction never exceeds extinction in a region") {
  // dying out globally forces every region to be eventually free, so
  // qbar <= q(., A) coordinate by coordinate and per boundary policy
  struct Case {
    Instance inst;
    std::string target;  // empty: the root
    bool equal;          // single-site models: the two quantities coincide
  };
  std::vector<Case> cases = {
      {{"gw", json{{"pmf", json{{"0", 0.25}, {"2", 0.75}}}}, 2}, "", true},
      {{"zd", json{{"d", 1}}, 10}, "", false},
      {{"tree", json{{"d", 3}}, 6}, "", false},
      {{"strip", json{{"p", 0.9}}, 8}, "0,1", false},
  };
  for (const Case& c : cases) {
    CAPTURE(c.inst.id);
    auto model = build(c.inst);
    VertexId a = c.target.empty() ? model->root() : model->intern(c.target);
    ExtinctionBracket qbar = global_extinction_bracket(model, c.inst.radius);
    LocalExtinctionResult loc = local_extinction_vector(model, {a}, c.inst.radius);
    REQUIRE(loc.q.lower.converged);
    REQUIRE(loc.q.upper.converged);
    // the local window is centered on the target, so compare where they overlap
    std::size_t shared = 0;
    for (std::size_t i = 0; i < qbar.window.size(); ++i) {
      int j = loc.q.window.index_of(qbar.window.verts[i]);
      if (j < 0) continue;
      ++shared;
      CHECK(qbar.lower.values[i] <=
            loc.q.lower.values[static_cast<std::size_t>(j)] + 1e-8);
      CHECK(qbar.upper.values[i] <=
            loc.q.upper.values[static_cast<std::size_t>(j)] + 1e-8);
      if (c.equal) {
        CHECK(qbar.lower.values[i] ==
              doctest::Approx(loc.q.lower.values[static_cast<std::size_t>(j)]).epsilon(1e-8));
        CHECK(qbar.upper.values[i] ==
              doctest::Approx(loc.q.upper.values[static_cast<std::size_t>(j)]).epsilon(1e-8));
      }
    }
    REQUIRE(shared >= qbar.window.size() / 2);
  }
}

TEST_CASE("diagonal moments are supermultiplicative") {
  // m^(a+b)_xx >= m^(a)_xx m^(b)_xx, the backbone of the certified lower
  // bound on the return growth rate
  std::vector<std::pair<Instance, int>> cases = {
      {{"gw", json{{"pmf", json{{"0", 0.25}, {"2", 0.75}}}}}, 40},
      {{"two-type-bp", json{{"p", 0.8}, {"rho", json{{"0", 0.25}, {"2", 0.75}}}}}, 40},
      {{"zd", json{{"d", 1}}}, 40},
      {{"strip", json{{"p", 0.9}}}, 24},
  };
  for (const auto& [inst, N] : cases) {
    CAPTURE(inst.id);
    auto model = build(inst);
    auto kernel = make_kernel(model);
    MomentSequence seq = n_step_moments(*kernel, model->root(), model->root(), N);
    for (int a = 1; a <= N; ++a) {
      for (int b = a; a + b <= N; ++b) {
        double la = seq.log_value(a), lb = seq.log_value(b), lab = seq.log_value(a + b);
        if (std::isinf(la) || std::isinf(lb)) continue;
        REQUIRE(lab >= la + lb - 1e-9);
      }
    }
  }
}

TEST_CASE("super solutions admit no strict interior maximum") {
  // the conjugated gap (z - qbar)/(1 - qbar) of a fixed point above qbar
  // must attain its maximum towards the boundary
  std::vector<Instance> instances = {
      {"zd", json{{"d", 1}}, 12},
      {"strip", json{{"p", 0.9}}, 8},
      {"gw", json{{"pmf", json{{"0", 0.25}, {"2", 0.75}}}}, 2},
  };
  for (const Instance& inst : instances) {
    CAPTURE(inst.id);
    auto model = build(inst);
    ExtinctionBracket qbar = global_extinction_bracket(model, inst.radius);
    LocalExtinctionResult loc = local_extinction_vector(model, {model->root()}, inst.radius);
    MaxPrincipleResult mp = maximum_principle_check(model, loc.q.window, loc.q.upper.values,
                                                    qbar.lower.values);
    CAPTURE(mp.precondition_msg);
    CHECK(mp.precondition_ok);
    CHECK(mp.holds);
    CHECK(mp.violations.empty());
  }
}

TEST_CASE("one step simulation means match the kernel rows") {
  struct Case {
    Instance inst;
    std::string start;  // empty: the root
  };
  std::vector<Case> cases = {
      {{"gw", json{{"pmf", json{{"0", 0.25}, {"2", 0.75}}}}}, ""},
      {{"zd", json{{"d", 1}}}, ""},
      {{"strip", json{{"p", 0.9}}}, ""},
      {{"tree", json{{"d", 3}}}, ""},
  };
  const std::int64_t trials = 300000;
  for (const Case& c : cases) {
    CAPTURE(c.inst.id);
    auto model = build(c.inst);
    auto kernel = make_kernel(model);
    VertexId start = c.start.empty() ? model->root() : model->intern(c.start);
    const auto& row = kernel->row(start);
    std::map<VertexId, double> expected(row.entries.begin(), row.entries.end());

    TrialPlan plan;
    plan.trials = trials;
    plan.horizon = 1;
    plan.master_seed = 424242;
    std::map<VertexId, double> sum, sumsq;
    Occupancy init{{start, 1}};
    for (std::int64_t t = 0; t < trials; ++t) {
      SimOutcome out = run_trial(model, init, plan, t);
      for (const auto& [v, n] : out.final_counts) {
        REQUIRE(expected.count(v));  // children only where the row has mass
        double x = static_cast<double>(n);
        sum[v] += x;
        sumsq[v] += x * x;
      }
    }
    for (const auto& [v, m] : expected) {
      double mean = sum[v] / static_cast<double>(trials);
      double var = sumsq[v] / static_cast<double>(trials) - mean * mean;
      double se = std::sqrt(std::max(var, 0.0) / static_cast<double>(trials));
      CAPTURE(model->label(v));
      CHECK(std::fabs(mean - m) <= 4.0 * std::max(se, 1e-4));
    }
  }
}

TEST_CASE("confidence intervals behave like confidence intervals") {
  WilsonInterval full = wilson_interval(1000, 1000);
  WilsonInterval none = wilson_interval(0, 1000);
  WilsonInterval half = wilson_interval(500, 1000);
  CHECK(full.lower <= 1.0);
  CHECK(full.upper == doctest::Approx(1.0));
  CHECK(none.lower == doctest::Approx(0.0));
  CHECK(none.upper >= 0.0);
  CHECK(half.lower < 0.5);
  CHECK(half.upper > 0.5);
  CHECK(half.lower >= 0.0);
  CHECK(half.upper <= 1.0);

  WilsonInterval small = wilson_interval(5, 10);
  CHECK(small.upper - small.lower > half.upper - half.lower);  // fewer trials, wider interval
  CHECK(wilson_interval(3, 7).estimate == doctest::Approx(3.0 / 7.0));
}
