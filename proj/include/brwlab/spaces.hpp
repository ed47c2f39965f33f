#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "brwlab/model.hpp"

namespace brw {

// ---------------------------------------------------------------------------
// Typed builders for the standard vertex spaces. All of them are also
// reachable through the catalog below; the typed entry points exist for
// callers that want compile-time parameters instead of JSON.
// ---------------------------------------------------------------------------

// Edge-breeding walk on the integer lattice: every vertex feeds its 2d
// neighbors at rate lambda each. d is capped at 3 because window sizes grow
// like radius^d and the library insists on materializing whole balls.
std::shared_ptr<BRWModel> lattice_Zd(int d, double lambda, int cap = 64);

enum class TreeDecoration { None, Loop, Clique, HalfLine };

struct TreeOptions {
  TreeDecoration decoration = TreeDecoration::None;
  std::string loop_at;       // label of the vertex carrying the loop (root "")
  double loop_rate = 0.0;    // self-rate of the loop vertex
  int clique_degree = 0;     // complete graph on clique_degree + 1 vertices
  int cap = 24;
};

// Regular tree of degree d >= 3 with unit edge rates, optionally decorated:
// a self-loop at one vertex, a complete graph hung off the root by an edge,
// or a half-line ray attached to the root of one branch (the tree part then
// has d - 1 forward children per vertex so every tree vertex keeps degree d).
std::shared_ptr<BRWModel> homogeneous_tree(int d, double lambda, const TreeOptions& opt = {});

// Rooted radial tree: a vertex at distance k from the root has period[(k) mod
// b] forward children (entries 1..9) plus its parent, unit edge rates.
std::shared_ptr<BRWModel> radial_tree(const std::vector<int>& period, double lambda,
                                      int cap = 40);

// ---------------------------------------------------------------------------
// Catalog: named example processes with machine-checkable known facts.
// ---------------------------------------------------------------------------

// One analytic fact about an example. `value` is present for numeric claims;
// qualitative claims carry only the statement. `derivation` says where the
// claim comes from in self-contained terms (closed form, embedded process,
// certificate), so a reader can recheck it without external context.
struct KnownFact {
  std::string key;        // stable handle used by tests and reports
  std::string statement;
  std::optional<double> value;
  double tolerance = 0.0;
  std::string derivation;
};

struct ExampleDescriptor {
  std::string id;
  std::string summary;
  nlohmann::json parameters;  // resolved: defaults overlaid with the caller's
  std::vector<KnownFact> facts;

  const KnownFact* fact(const std::string& key) const;
  nlohmann::json to_json() const;
};

// Ids in a fixed, CLI-stable order.
const std::vector<std::string>& catalog_ids();
bool catalog_has(const std::string& id);

// Resolves parameters and assembles the fact sheet. Unknown ids, unknown
// parameter names and out-of-domain values raise DomainError with the
// violated condition spelled out.
ExampleDescriptor describe_example(const std::string& id,
                                   const nlohmann::json& params = nlohmann::json());

// Builds the model for an example; same validation as describe_example.
std::shared_ptr<BRWModel> build_example(const std::string& id,
                                        const nlohmann::json& params = nlohmann::json());

// ---------------------------------------------------------------------------
// Fact checking: recompute every known fact with library machinery.
// ---------------------------------------------------------------------------

struct FactCheckBudget {
  int radius = 12;             // window radius for fixed points and classes
  int horizon = 40;            // moment / series depth
  std::int64_t trials = 1500;  // Monte Carlo facts
  std::uint64_t seed = defaults::master_seed;
};

struct FactCheckRow {
  std::string fact_key;
  std::string statement;
  std::optional<double> expected;
  std::optional<double> computed;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;  // what was run and what it produced
};

// One row per known fact of the example, in declaration order. The handlers
// recompute each claim from scratch (fixed points, certified spectral bounds,
// exact kernel checks, or short Monte Carlo runs as a last resort).
std::vector<FactCheckRow> check_example_facts(const std::string& id,
                                              const nlohmann::json& params = nlohmann::json(),
                                              const FactCheckBudget& budget = {});

// ---------------------------------------------------------------------------
// Closed-form sequences and the sum / infinite product dichotomy
//   sum k_i a_i < inf  <=>  prod (1 - a_i)^{k_i} > 0
// (equivalence for a_i in [0,1) with k_i >= 1 eventually; the product being
// positive always forces the sum to converge).
// ---------------------------------------------------------------------------

// value(i) = scale * ratio^i * i^power, with the i^power factor read as 1 at
// i = 0 so geometric sequences can start there. This covers the shapes the
// catalog needs (geometric terms, p-series, products of the two).
struct ClosedFormSeq {
  double scale = 1.0;
  double ratio = 1.0;
  double power = 0.0;

  double value(std::int64_t i) const;

  static ClosedFormSeq geometric(double a, double r) { return {a, r, 0.0}; }
  static ClosedFormSeq power_law(double c, double exponent) { return {c, 1.0, -exponent}; }
  static ClosedFormSeq constant(double c) { return {c, 1.0, 0.0}; }
};

enum class TailVerdict { Converges, Diverges, Inconclusive };
const char* tail_verdict_name(TailVerdict v);

struct SequenceConditionReport {
  std::int64_t first = 0, horizon = 0;
  double partial_sum = 0.0;      // sum_{first <= i <= horizon} k_i a_i
  double partial_product = 1.0;  // prod over the same range of (1 - a_i)^{k_i}
  // Certified bound on the tail of the sum past the horizon, when the closed
  // form admits one (geometric ratio < 1 or p-series with exponent > 1).
  std::optional<double> sum_tail_bound;
  // Certified lower bound on the full infinite product, when the tail bound
  // and a monotone tail of a_i give one.
  std::optional<double> product_lower;
  TailVerdict verdict = TailVerdict::Inconclusive;
  bool equivalence_applies = false;  // a_i in [0,1) and k_i >= 1 on the tail
  std::string reason;
};

// Raises DomainError when some a_i >= 1 on [first, horizon] or the closed
// form is unbounded (so a_i >= 1 eventually), and when k_i < 0 anywhere.
SequenceConditionReport sequence_condition_check(const ClosedFormSeq& alpha,
                                                 const ClosedFormSeq& k, std::int64_t horizon,
                                                 std::int64_t first = 0);

}  // namespace brw
