#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "brwlab/model.hpp"
#include "brwlab/spaces.hpp"

namespace brw {

inline constexpr const char* kToolVersion = "0.1.0";

// Global numeric knobs of one experiment. Any task may override any of them
// inside its own params object.
struct RunSettings {
  int radius = 12;                          // window radius
  int N = 40;                               // moment / series depth
  double tol = defaults::fixed_point_tol;   // fixed-point stopping tolerance
  std::int64_t trials = 10000;              // Monte Carlo trials
  int horizon = 100;                        // Monte Carlo generations
  std::uint64_t seed = defaults::master_seed;
};

struct TaskSpec {
  std::string name;       // validate, classify-local, classify-global, extinction,
                          // never-hit, series, diagnostics, simulate, sweep
  nlohmann::json params;  // task extras plus per-task setting overrides
};

struct ExperimentConfig {
  nlohmann::json model_spec;
  std::vector<TaskSpec> tasks;
  RunSettings settings;
  std::string out_dir;  // empty: decided by the caller

  // Canonical JSON with every default filled in; the manifest hash covers
  // exactly this document, so it is independent of the output directory.
  nlohmann::json resolved() const;
};

// Accepts a raw config or a manifest (a document with a "config" key).
// Schema violations raise DomainError naming the offending key.
ExperimentConfig parse_experiment_config(const nlohmann::json& doc);

// Model specification document:
//   {"example": id, "params": {...}}                        catalog route
//   {"root": label, "laws": {label: law, ...},              inline law table
//    "lambda": 1.0, "time": "discrete"|"continuous",
//    "cap": n, "name": str}
// with law one of
//   {"explicit": [[prob, {label: count, ...}], ...]}
//   {"diffusion": {"pmf": {count: prob} | "geometric": mean,
//                  "placement": {label: prob, ...}}}
//   {"rates": {label: rate, ...}}
// Every label referenced by a law must itself have a law entry.
std::shared_ptr<BRWModel> build_model_spec(const nlohmann::json& spec);

struct TaskResult {
  std::string task;
  bool ok = false;
  std::string error;      // exception text when not ok
  nlohmann::json report;  // task summary, embedded into report.json
  std::vector<std::pair<std::string, std::string>> files;  // name -> contents
};

struct ExperimentResult {
  int exit_code = 0;  // 0 done, 2 model rejected, 3 some task failed
  std::string error;  // model rejection message, when exit_code == 2
  nlohmann::json manifest;
  nlohmann::json report;
  std::vector<TaskResult> tasks;
};

// Executes the tasks in order. Pure: output files come back as strings.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Command line overrides; only what was actually given on the command line.
struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> trials;
  std::optional<int> radius;
};

// Parse, apply overrides, run, write manifest.json / report.json / task CSVs
// under out_dir. Returns the process exit code and logs progress to log.
int run_experiment_files(const nlohmann::json& doc, const std::string& out_dir,
                         const CliOverrides& over, std::ostream& log);

struct ReproduceResult {
  std::string id;
  std::vector<FactCheckRow> rows;
  bool pass = false;
};

// Recomputes every known fact of a catalog example. Unknown ids raise
// DomainError like the catalog itself does.
ReproduceResult reproduce_example(const std::string& id, const FactCheckBudget& budget = {});

// Structural contract for report.json. The checker enforces exactly the
// published schema document below.
bool report_schema_ok(const nlohmann::json& report, std::string* why = nullptr);
const char* report_schema_text();

}  // namespace brw
