#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <string>

#include <json.hpp>

#include "brwlab/kernel.hpp"
#include "brwlab/model.hpp"
#include "brwlab/spaces.hpp"

using namespace brw;
using nlohmann::json;

namespace {

// true iff fn() throws DomainError whose message cites the needle
template <class Fn>
bool domain_error_citing(Fn&& fn, const std::string& needle) {
  try {
    fn();
  } catch (const DomainError& e) {
    return std::string(e.what()).find(needle) != std::string::npos;
  } catch (...) {
    return false;
  }
  return false;
}

}  // namespace

TEST_CASE("catalog surface: ids, descriptors, serialization") {
  const auto& ids = catalog_ids();
  CHECK(ids.size() == 16);
  std::set<std::string> uniq(ids.begin(), ids.end());
  CHECK(uniq.size() == ids.size());

  for (const std::string& id : ids) {
    CAPTURE(id);
    CHECK(catalog_has(id));
    ExampleDescriptor d = describe_example(id);
    CHECK(d.id == id);
    CHECK(!d.summary.empty());
    CHECK(!d.facts.empty());
    json j = d.to_json();
    CHECK(j.at("id").get<std::string>() == id);
    CHECK(j.at("facts").size() == d.facts.size());
    for (const KnownFact& f : d.facts) {
      CAPTURE(f.key);
      CHECK(!f.statement.empty());
      CHECK(!f.derivation.empty());
      CHECK(d.fact(f.key) == &f);
    }
  }

  CHECK(!catalog_has("no-such-example"));
  CHECK_THROWS_AS(describe_example("no-such-example"), DomainError);
  CHECK_THROWS_AS(build_example("no-such-example"), DomainError);
  CHECK_THROWS_AS(describe_example("gw", json{{"bogus", 1}}), DomainError);
}

TEST_CASE("parameter overrides merge onto defaults") {
  ExampleDescriptor d = describe_example("zd", json{{"d", 2}});
  CHECK(d.parameters.at("d").get<int>() == 2);
  CHECK(d.parameters.at("lambda").get<double>() == doctest::Approx(0.5));

  ExampleDescriptor t = describe_example("tree", json{{"lambda", 0.4}});
  CHECK(t.parameters.at("d").get<int>() == 3);
  CHECK(t.parameters.at("lambda").get<double>() == doctest::Approx(0.4));
  // facts are recomputed against the resolved parameters
  const KnownFact* f = t.fact("critical-global");
  REQUIRE(f != nullptr);
  CHECK(*f->value == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("builders reject out-of-range parameters with the condition spelled out") {
  CHECK(domain_error_citing([] { build_example("strip", json{{"p", 0.4}}); }, "1/2 < p < 1"));
  CHECK(domain_error_citing([] { build_example("zd", json{{"d", 4}}); }, "1 <= d <= 3"));
  CHECK(domain_error_citing([] { build_example("tree", json{{"d", 2}}); }, "3 <= d <= 9"));
  CHECK(domain_error_citing([] { build_example("radial-tree", json{{"period", {1, 12}}}); },
                            "between 1 and 9"));
  CHECK(domain_error_citing([] { build_example("noext-pair", json{{"cap", 60}}); }, "cap <= 54"));
  CHECK(domain_error_citing([] { build_example("noext-pair", json{{"variant", "C"}}); },
                            "\"A\" or \"B\""));
  CHECK(domain_error_citing([] { build_example("tree-loop", json{{"loop_rate", -1.0}}); },
                            "loop_rate > 0"));
  CHECK(domain_error_citing([] { build_example("two-type-bp", json{{"p", 1.5}}); }, "0 < p <= 1"));
  CHECK(domain_error_citing([] { build_example("gw", json{{"pmf", {{"0", 0.5}, {"2", 0.6}}}}); },
                            "sum to 1"));
  CHECK(domain_error_citing([] { build_example("gw", json{{"pmf", {{"x", 0.5}}}}); },
                            "offspring count"));
}

TEST_CASE("typed builders produce the advertised local geometry") {
  auto z2 = lattice_Zd(2, 0.25, 32);
  auto kz = make_kernel(z2);
  CHECK(kz->row(z2->root()).entries.size() == 4);
  CHECK(kz->row(z2->root()).sum == doctest::Approx(1.0).epsilon(1e-12));

  auto t3 = homogeneous_tree(3, 0.5);
  auto kt = make_kernel(t3);
  CHECK(kt->row(t3->root()).entries.size() == 3);
  make_ball(t3, t3->root(), 3);
  auto one = t3->find("1");
  REQUIRE(one.has_value());
  CHECK(kt->row(*one).entries.size() == 3);  // parent plus two forward children

  auto rt = radial_tree({2, 3}, 0.3, 40);
  auto kr = make_kernel(rt);
  CHECK(kr->row(rt->root()).entries.size() == 2);
  make_ball(rt, rt->root(), 3);
  auto v1 = rt->find("1");
  REQUIRE(v1.has_value());
  CHECK(kr->row(*v1).entries.size() == 4);  // parent plus three forward children
}

TEST_CASE("identical-kernel pair: variants agree entrywise, exactly") {
  auto A = build_example("noext-pair", json{{"variant", "A"}});
  auto B = build_example("noext-pair", json{{"variant", "B"}});
  auto ka = make_kernel(A);
  auto kb = make_kernel(B);
  make_ball(A, A->root(), 44);
  make_ball(B, B->root(), 44);
  bool all_equal = true;
  for (int n = 0; n < 44 && all_equal; ++n) {
    const auto& ra = ka->row(A->intern(std::to_string(n)));
    const auto& rb = kb->row(B->intern(std::to_string(n)));
    if (ra.entries.size() != rb.entries.size()) {
      all_equal = false;
      break;
    }
    for (std::size_t i = 0; i < ra.entries.size(); ++i) {
      if (A->label(ra.entries[i].first) != B->label(rb.entries[i].first) ||
          ra.entries[i].second != rb.entries[i].second)
        all_equal = false;
    }
  }
  CHECK(all_equal);
}

TEST_CASE("sequence dichotomy: geometric weights against geometric escape counts") {
  // sum of 2^i * 2^-2i is geometric with ratio 1/2
  SequenceConditionReport rep = sequence_condition_check(ClosedFormSeq::geometric(1.0, 0.25),
                                                         ClosedFormSeq::geometric(1.0, 2.0), 30, 1);
  CHECK(rep.verdict == TailVerdict::Converges);
  REQUIRE(rep.sum_tail_bound.has_value());
  double oracle = 0.0;
  for (int i = 1; i <= 30; ++i) oracle += std::pow(2.0, i) * std::pow(2.0, -2 * i);
  CHECK(rep.partial_sum == doctest::Approx(oracle).epsilon(1e-14));
  CHECK(rep.partial_sum + *rep.sum_tail_bound >= 1.0 - 1e-12);
  CHECK(rep.partial_sum <= 1.0);
  CHECK(rep.equivalence_applies);
  REQUIRE(rep.product_lower.has_value());
  CHECK(*rep.product_lower > 0.0);
  CHECK(*rep.product_lower <= rep.partial_product);
}

TEST_CASE("sequence dichotomy: harmonic weights diverge") {
  SequenceConditionReport rep = sequence_condition_check(ClosedFormSeq::power_law(1.0, 1.0),
                                                         ClosedFormSeq::constant(1.0), 200, 2);
  CHECK(rep.verdict == TailVerdict::Diverges);
  CHECK(rep.equivalence_applies);
  CHECK(rep.reason.find("product") != std::string::npos);
  // partial product of (1 - 1/i) telescopes to first/horizon
  CHECK(rep.partial_product == doctest::Approx(1.0 / 200.0).epsilon(1e-9));
}

TEST_CASE("sequence dichotomy: domain violations throw") {
  CHECK_THROWS_AS(sequence_condition_check(ClosedFormSeq::constant(1.0),
                                           ClosedFormSeq::constant(1.0), 10, 0),
                  DomainError);
  CHECK_THROWS_AS(sequence_condition_check(ClosedFormSeq::geometric(0.5, 2.0),
                                           ClosedFormSeq::constant(1.0), 10, 0),
                  DomainError);
  CHECK_THROWS_AS(sequence_condition_check(ClosedFormSeq::power_law(1.0, 1.0),
                                           ClosedFormSeq::constant(1.0), 10, 1),
                  DomainError);  // alpha_1 = 1 is not < 1
  CHECK_THROWS_AS(sequence_condition_check(ClosedFormSeq::geometric(0.5, 0.5),
                                           ClosedFormSeq::geometric(-1.0, 2.0), 10, 0),
                  DomainError);
}

TEST_CASE("sequence dichotomy: p-series tail bounds") {
  SequenceConditionReport rep = sequence_condition_check(ClosedFormSeq::power_law(1.0, 2.0),
                                                         ClosedFormSeq::constant(1.0), 1000, 2);
  CHECK(rep.verdict == TailVerdict::Converges);
  REQUIRE(rep.sum_tail_bound.has_value());
  // true tail of sum 1/i^2 past 1000 is about 1e-3
  CHECK(*rep.sum_tail_bound >= 0.0009);
  CHECK(*rep.sum_tail_bound <= 0.0012);
  double zeta2 = 1.6449340668482264;  // sum over i >= 1 of 1/i^2
  CHECK(rep.partial_sum + *rep.sum_tail_bound >= zeta2 - 1.0 - 1e-6);
}

TEST_CASE("every cataloged fact passes its checker") {
  FactCheckBudget budget;
  for (const std::string& id : catalog_ids()) {
    CAPTURE(id);
    std::vector<FactCheckRow> rows = check_example_facts(id, json(), budget);
    CHECK(!rows.empty());
    for (const FactCheckRow& r : rows) {
      CAPTURE(r.fact_key);
      CAPTURE(r.detail);
      CHECK(r.pass);
    }
  }
}

TEST_CASE("catalog models validate on a radius-20 ball") {
  for (const std::string& id : catalog_ids()) {
    CAPTURE(id);
    auto model = build_example(id);
    ValidationReport rep = validate_model(model, 20);
    CAPTURE(rep.ok());
    CHECK(rep.ok());
  }
}
