#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "brwlab/common.hpp"
#include "brwlab/rng.hpp"

namespace brw {

// One offspring configuration: how many children land on which vertex.
// Entries are unique per vertex and counts are >= 1; an empty config is the
// "no children" outcome.
struct OffspringConfig {
  std::vector<std::pair<VertexId, std::int64_t>> counts;

  std::int64_t total() const {
    std::int64_t t = 0;
    for (const auto& [v, c] : counts) t += c;
    return t;
  }
};

// Number-of-children law for independent-diffusion sites.
struct FiniteCountLaw {
  // (count, probability), probabilities sum to 1.
  std::vector<std::pair<std::int64_t, double>> pmf;
};
struct GeometricCountLaw {
  double mean = 0.0;  // P(k) = (1/(1+mean)) (mean/(1+mean))^k
};
using CountLaw = std::variant<FiniteCountLaw, GeometricCountLaw>;

double count_law_mean(const CountLaw& law);
// Probability generating function E[s^N] of the count law, s in [0,1].
double count_law_pgf(const CountLaw& law, double s);
// P(N = 0).
double count_law_mass_at_zero(const CountLaw& law);

// Raw (label-addressed) site laws, as produced by space builders. The model
// interns labels into dense vertex ids and keeps the resolved versions below.
struct RawExplicitLaw {
  // (offspring configuration by label, probability); probabilities sum to 1.
  std::vector<std::pair<std::vector<std::pair<std::string, std::int64_t>>, double>> outcomes;
};
struct RawDiffusionLaw {
  CountLaw count;
  std::vector<std::pair<std::string, double>> placement;  // row of a stochastic matrix
};
struct RawRatesLaw {
  // Continuous-time displacement rates k(x,y) >= 0. The model-level intensity
  // multiplies these; the discrete counterpart uses a geometric count with
  // mean lambda * k(x) and placement k(x,y)/k(x).
  std::vector<std::pair<std::string, double>> rates;
};
using RawSiteLaw = std::variant<RawExplicitLaw, RawDiffusionLaw, RawRatesLaw>;

// Resolved per-site law. Children are vertex ids; sampling tables are built
// eagerly so simulation threads only read.
struct ExplicitSiteLaw {
  std::vector<std::pair<OffspringConfig, double>> outcomes;
  AliasTable pick;  // over outcomes
};

struct DiffusionSiteLaw {
  CountLaw count;
  std::vector<std::pair<VertexId, double>> placement;
  AliasTable place;       // over placement entries
  AliasTable count_pick;  // only for FiniteCountLaw
  double mean_children = 0.0;
  // Set for laws derived from rates: moment row is lambda * rates, computed
  // directly from the stored rates to avoid p * mean round-off.
  std::vector<std::pair<VertexId, double>> rates;
  double rate_total = 0.0;
  bool from_rates = false;
};

struct SiteLaw {
  std::variant<ExplicitSiteLaw, DiffusionSiteLaw> law;

  const ExplicitSiteLaw* as_explicit() const { return std::get_if<ExplicitSiteLaw>(&law); }
  const DiffusionSiteLaw* as_diffusion() const { return std::get_if<DiffusionSiteLaw>(&law); }

  // Expected total number of children.
  double mean_total() const;
  // P(no children at all).
  double mass_no_children() const;
};

}  // namespace brw
