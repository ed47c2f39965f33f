#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <set>
#include <string>

#include "brwlab/digraph.hpp"
#include "brwlab/kernel.hpp"
#include "brwlab/model.hpp"

using namespace brw;

namespace {

// Single-site process: 2 children with prob 3/4, none with prob 1/4.
std::shared_ptr<BRWModel> make_gw() {
  RawExplicitLaw law;
  law.outcomes.push_back({{{"o", 2}}, 0.75});
  law.outcomes.push_back({{}, 0.25});
  ModelOptions opt;
  opt.name = "gw";
  return BRWModel::finite("o", {{"o", law}}, opt);
}

// Two sites: type 1 makes 0 or 2 children on type 2, type 2 makes one child
// on type 1 with prob 4/5 and dies otherwise.
std::shared_ptr<BRWModel> make_two_type() {
  RawExplicitLaw l1, l2;
  l1.outcomes.push_back({{}, 0.25});
  l1.outcomes.push_back({{{"2", 2}}, 0.75});
  l2.outcomes.push_back({{{"1", 1}}, 0.8});
  l2.outcomes.push_back({{}, 0.2});
  ModelOptions opt;
  opt.name = "two-type";
  return BRWModel::finite("1", {{"1", l1}, {"2", l2}}, opt);
}

// Lazy half line 0 -> 1 -> 2 -> ... with unit jump rates both ways (rate 1
// right, rate 1 left except at 0).
std::shared_ptr<BRWModel> make_halfline(double lambda, int cap) {
  ModelOptions opt;
  opt.cap = cap;
  opt.lambda = lambda;
  opt.time = TimeKind::ContinuousCounterpart;
  opt.name = "halfline";
  opt.depth_of = [](const std::string& s) { return std::atoi(s.c_str()); };
  auto gen = [](const std::string& s) -> RawSiteLaw {
    int i = std::atoi(s.c_str());
    RawRatesLaw law;
    law.rates.push_back({std::to_string(i + 1), 1.0});
    if (i > 0) law.rates.push_back({std::to_string(i - 1), 1.0});
    return law;
  };
  return std::make_shared<BRWModel>("0", gen, opt);
}

}  // namespace

TEST_CASE("finite model interning follows breadth first order") {
  auto m = make_two_type();
  CHECK(m->is_finite());
  CHECK(m->root() == 0);
  CHECK(m->label(0) == "1");
  CHECK(m->label(1) == "2");
  CHECK(m->find("2").value() == 1);
  CHECK(!m->find("3").has_value());
  CHECK(m->law_available(0));
  CHECK(m->depth(0) == 0);
  CHECK(m->depth(1) == 1);
}

TEST_CASE("site law summaries") {
  auto m = make_gw();
  const SiteLaw& law = m->law(0);
  CHECK(law.mean_total() == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(law.mass_no_children() == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("unnormalized laws are rejected") {
  RawExplicitLaw bad;
  bad.outcomes.push_back({{{"o", 1}}, 0.5});
  ModelOptions opt;
  CHECK_THROWS_AS(BRWModel::finite("o", {{"o", bad}}, opt), ModelError);
}

TEST_CASE("moment kernel entries for explicit laws") {
  auto m = make_two_type();
  MomentKernel k(m);
  CHECK(k.entry(0, 1) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(k.entry(1, 0) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(k.entry(0, 0) == 0.0);
  CHECK(k.row(0).sum == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("rates laws yield exact kernel entries and geometric counts") {
  auto m = make_halfline(0.5, 100);
  MomentKernel k(m);
  VertexId v0 = m->root();
  VertexId v1 = m->intern("1");
  CHECK(k.entry(v0, v1) == 0.5);  // lambda * rate, no round trip through p * mean
  const SiteLaw& law = m->law(v1);
  const auto* d = law.as_diffusion();
  REQUIRE(d != nullptr);
  CHECK(d->from_rates);
  CHECK(std::holds_alternative<GeometricCountLaw>(d->count));
  CHECK(std::get<GeometricCountLaw>(d->count).mean == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(law.mass_no_children() == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("lazy balls expand deterministically and respect the cap") {
  auto m = make_halfline(1.0, 100);
  Window w = make_ball(m, m->root(), 3);
  REQUIRE(w.size() == 4);
  CHECK(m->label(w.verts[0]) == "0");
  CHECK(m->label(w.verts[3]) == "3");
  CHECK(w.dist[3] == 3);
  CHECK(m->generated_count() == 4);  // frontier interned, nothing beyond it
  CHECK(w.index_of(999) == -1);

  auto capped = make_halfline(1.0, 3);
  CHECK(!capped->law_available(capped->intern("3")));
  CHECK(capped->law_available(capped->intern("2")));
  CHECK_THROWS_AS(make_ball(capped, capped->root(), 4), CapExceededError);
  CHECK_NOTHROW(make_ball(capped, capped->root(), 3));
}

TEST_CASE("depth comes from the builder for lazy spaces") {
  auto m = make_halfline(1.0, 100);
  make_ball(m, m->root(), 5);
  CHECK(m->depth(m->intern("4")) == 4);
}

TEST_CASE("strongly connected classes, periods, topological order") {
  // c has a self loop and feeds a <-> b; the a,b class has period 2.
  RawExplicitLaw la, lb, lc;
  la.outcomes.push_back({{{"b", 1}}, 1.0});
  lb.outcomes.push_back({{{"a", 1}}, 1.0});
  lc.outcomes.push_back({{{"c", 1}, {"a", 1}}, 0.5});
  lc.outcomes.push_back({{}, 0.5});
  ModelOptions opt;
  auto m = BRWModel::finite("c", {{"a", la}, {"b", lb}, {"c", lc}}, opt);
  auto k = make_kernel(m);
  DigraphAnalysis d = analyze_digraph(*k, m->root(), 10);
  REQUIRE(d.members.size() == 2);
  int cc = d.class_of_vertex(m->find("c").value());
  int ca = d.class_of_vertex(m->find("a").value());
  CHECK(cc != ca);
  CHECK(d.period[cc] == 1);
  CHECK(d.period[ca] == 2);
  CHECK(d.class_of_vertex(m->find("b").value()) == ca);
  // condensation edge c -> {a,b} puts the c class first
  REQUIRE(d.topo_order.size() == 2);
  CHECK(d.topo_order[0] == cc);
  CHECK(d.topo_order[1] == ca);
}

TEST_CASE("mixed cycle lengths give period one") {
  RawExplicitLaw lx, ly, lz;
  lx.outcomes.push_back({{{"y", 1}}, 1.0});
  ly.outcomes.push_back({{{"x", 1}}, 0.5});
  ly.outcomes.push_back({{{"z", 1}}, 0.5});
  lz.outcomes.push_back({{{"x", 1}}, 1.0});
  ModelOptions opt;
  auto m = BRWModel::finite("x", {{"x", lx}, {"y", ly}, {"z", lz}}, opt);
  auto k = make_kernel(m);
  DigraphAnalysis d = analyze_digraph(*k, m->root(), 10);
  REQUIRE(d.members.size() == 1);
  CHECK(d.period[0] == 1);
}

TEST_CASE("kernel csv quotes labels containing commas") {
  RawExplicitLaw l;
  l.outcomes.push_back({{{"(1,0)", 1}}, 1.0});
  RawExplicitLaw l2;
  l2.outcomes.push_back({{}, 1.0});
  ModelOptions opt;
  auto m = BRWModel::finite("(0,0)", {{"(0,0)", l}, {"(1,0)", l2}}, opt);
  MomentKernel k(m);
  Window w = make_ball(m, m->root(), 2);
  std::string csv = k.to_csv(w);
  CHECK(csv.find("\"(0,0)\",\"(1,0)\",1") != std::string::npos);
}

TEST_CASE("validation accepts healthy models") {
  auto gw = make_gw();
  auto rep = validate_model(gw, 5);
  CHECK(rep.ok());
  CHECK(rep.sup_mean_offspring == doctest::Approx(1.5));
  CHECK_NOTHROW(validate_or_throw(make_halfline(1.0, 100), 5));
}

TEST_CASE("validation flags the degenerate one-child class") {
  RawExplicitLaw loop;
  loop.outcomes.push_back({{{"s", 1}}, 1.0});
  ModelOptions opt;
  auto m = BRWModel::finite("s", {{"s", loop}}, opt);
  auto rep = validate_model(m, 5);
  CHECK(!rep.ok());
  CHECK_THROWS_AS(validate_or_throw(m, 5), ModelError);
}
