#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "brwlab/model.hpp"
#include "brwlab/rng.hpp"

namespace brw {

constexpr std::int64_t kNoTruncation = -1;

// Sparse particle counts for one generation.
using Occupancy = std::map<VertexId, std::int64_t>;

// What one batch of simulations does, independent of the model it runs on.
// Per-trial randomness is derived from (master_seed, trial index) only, so
// results do not depend on plan.workers or scheduling.
struct TrialPlan {
  std::int64_t trials = 1000;
  int horizon = 100;                         // generations to simulate
  std::int64_t population_cap = 10'000'000;  // total particles, stop above this
  std::int64_t truncation = kNoTruncation;   // per-site cap, applied after aggregation
  std::uint64_t master_seed = defaults::master_seed;
  // Restrained reproduction: a child placed at a site already holding k
  // particles of the generation under construction is kept with probability
  // accept(k). Children are considered one at a time, sites in label order,
  // parents in particle order, so the sequence is reproducible. Null = plain.
  std::function<double(std::int64_t)> accept;
  std::vector<std::vector<VertexId>> targets;  // visit counters per target set
  int workers = 1;
};

enum class StopReason { Extinct, Horizon, PopulationCap, EscapedBall };
const char* stop_reason_name(StopReason r);

struct TargetVisits {
  std::int64_t first_visit = -1;  // generation of first occupancy, -1 = never
  std::int64_t last_visit = -1;
  std::int64_t total = 0;  // occupancy summed over generations
};

struct SimOutcome {
  StopReason stop = StopReason::Horizon;
  int final_generation = 0;
  std::int64_t max_population = 0;
  std::vector<TargetVisits> targets;  // parallel to plan.targets
  Occupancy final_counts;             // state when the trial stopped
};

// One trial from an arbitrary initial state. Hitting the lazy-generation cap
// of the model is not an error: the trial stops with reason EscapedBall.
SimOutcome run_trial(const std::shared_ptr<const BRWModel>& model, const Occupancy& initial,
                     const TrialPlan& plan, std::int64_t trial_index);

// plan.trials independent trials from one particle at start, in trial order.
std::vector<SimOutcome> run_trials(const std::shared_ptr<const BRWModel>& model, VertexId start,
                                   const TrialPlan& plan);

struct WilsonInterval {
  std::int64_t successes = 0;
  std::int64_t trials = 0;
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};
// 95% score interval for a binomial proportion.
WilsonInterval wilson_interval(std::int64_t successes, std::int64_t trials);

enum class SurvivalMode { Global, LocalAt, StrongLocalAt };
const char* survival_mode_name(SurvivalMode m);

struct SurvivalEstimate {
  SurvivalMode mode = SurvivalMode::Global;
  WilsonInterval ci;
  // Trials by stop reason.
  std::int64_t extinct = 0, at_horizon = 0, capped = 0, escaped = 0;
  // Among trials counted as surviving, the fraction that stopped early at the
  // population cap or the window edge instead of being observed alive at the
  // horizon. Large values mean the horizon verdict is soft.
  double censored_fraction = 0.0;
  int quarter_start = 0;  // first generation of the visit window (local modes)
};

// Global: alive when the trial stopped (cap and escape stops count as alive,
//   which biases the estimate up; see censored_fraction).
// LocalAt: plan.targets[0] occupied at some generation in the last quarter of
//   the horizon. A recurrence proxy: transient early visits do not count.
// StrongLocalAt: the same visit event among surviving trials only.
SurvivalEstimate estimate_survival(const std::shared_ptr<const BRWModel>& model, VertexId start,
                                   const TrialPlan& plan, SurvivalMode mode);

struct TruncationSweepResult {
  std::vector<std::int64_t> levels;               // as given
  std::vector<WilsonInterval> survival;           // global survival per level
  std::vector<std::vector<SimOutcome>> outcomes;  // [level][trial]
};

// Runs every truncation level on identical sampled offspring configurations
// and checks the per-site counts are pointwise nondecreasing in the level,
// every generation of every trial. Levels must be ascending; kNoTruncation
// (no cap) is allowed as the last entry. A domination violation would be a
// programming error, not a modeling outcome, and throws std::logic_error.
TruncationSweepResult coupled_truncation_sweep(const std::shared_ptr<const BRWModel>& model,
                                               VertexId start, const TrialPlan& plan,
                                               const std::vector<std::int64_t>& levels);

std::string trial_csv_header();
std::string trial_csv_row(std::int64_t trial, const SimOutcome& o);

}  // namespace brw
