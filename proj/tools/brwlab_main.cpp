#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "brwlab/common.hpp"
#include "brwlab/experiment.hpp"
#include "brwlab/spaces.hpp"

using nlohmann::json;

namespace {

// Exit codes: 0 success, 2 bad input (config, unknown id, unreadable file),
// 3 a task or fact check failed.

std::optional<json> load_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) {
    std::cerr << "cannot open " << path << "\n";
    return std::nullopt;
  }
  json doc = json::parse(f, nullptr, false);
  if (doc.is_discarded()) {
    std::cerr << path << " is not valid JSON\n";
    return std::nullopt;
  }
  return doc;
}

int cmd_catalog(bool as_json) {
  if (as_json) {
    json out = json::array();
    for (const std::string& id : brw::catalog_ids())
      out.push_back(brw::describe_example(id).to_json());
    std::cout << out.dump(2) << "\n";
    return 0;
  }
  for (const std::string& id : brw::catalog_ids()) {
    brw::ExampleDescriptor d = brw::describe_example(id);
    std::printf("%-16s %s\n", id.c_str(), d.summary.c_str());
  }
  return 0;
}

int cmd_validate(const std::string& path, int radius) {
  auto doc = load_json(path);
  if (!doc) return 2;
  try {
    brw::ExperimentConfig cfg = brw::parse_experiment_config(*doc);
    if (radius > 0) cfg.settings.radius = radius;
    auto model = brw::build_model_spec(cfg.model_spec);
    brw::ValidationReport rep = brw::validate_model(model, cfg.settings.radius);
    for (const auto& issue : rep.issues) {
      const char* sev = issue.severity == brw::ValidationIssue::Severity::Fatal ? "fatal"
                        : issue.severity == brw::ValidationIssue::Severity::Warning ? "warning"
                                                                                    : "note";
      std::printf("  [%s] %s\n", sev, issue.message.c_str());
    }
    std::printf("model %s: sup mean offspring %.6g, %s\n", model->name().c_str(),
                rep.sup_mean_offspring, rep.ok() ? "ok" : "rejected");
    return rep.ok() ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "invalid: " << e.what() << "\n";
    return 2;
  }
}

int cmd_run(const std::string& path, std::string out_dir, const brw::CliOverrides& over) {
  auto doc = load_json(path);
  if (!doc) return 2;
  if (out_dir.empty()) {
    if (doc->is_object() && doc->contains("out") && doc->at("out").is_string())
      out_dir = doc->at("out").get<std::string>();
    else
      out_dir = "brwlab-out";
  }
  return brw::run_experiment_files(*doc, out_dir, over, std::cout);
}

void print_rows(const brw::ReproduceResult& r) {
  std::printf("%s\n", r.id.c_str());
  for (const brw::FactCheckRow& row : r.rows) {
    std::string expected = row.expected ? std::to_string(*row.expected) : "-";
    std::string computed = row.computed ? std::to_string(*row.computed) : "-";
    std::printf("  %-28s expected %-13s computed %-13s tol %-9.3g %s\n", row.fact_key.c_str(),
                expected.c_str(), computed.c_str(), row.tolerance,
                row.pass ? "pass" : "FAIL");
    if (!row.detail.empty()) std::printf("      %s\n", row.detail.c_str());
  }
}

int cmd_reproduce(const std::string& id, const brw::FactCheckBudget& budget) {
  std::vector<std::string> ids;
  if (id == "all")
    ids = brw::catalog_ids();
  else
    ids.push_back(id);
  bool all_pass = true;
  for (const std::string& one : ids) {
    try {
      brw::ReproduceResult r = brw::reproduce_example(one, budget);
      print_rows(r);
      all_pass = all_pass && r.pass;
    } catch (const brw::DomainError& e) {
      std::cerr << e.what() << "\n";
      return 2;
    }
  }
  return all_pass ? 0 : 3;
}

constexpr const char* kFooter = R"(Config file (JSON):
  {"model": ..., "tasks": [...], "settings": {...}, "out": "dir"}

  model: {"example": id, "params": {...}} picks a catalog example, or an
  inline law table {"root": label, "laws": {label: law}, "lambda": l,
  "time": "discrete"|"continuous", "cap": n, "name": str} with law one of
    {"explicit": [[prob, {label: count}], ...]}
    {"diffusion": {"pmf": {count: prob} | "geometric": mean,
                   "placement": {label: prob}}}
    {"rates": {label: rate}}

  tasks: array of task names or {"task": name, ...params}. Tasks:
    validate        model sanity over a window       (radius)
    classify-local  local survival verdict           (site, radius, N)
    classify-global global verdict; finite models directly, infinite ones
                    through "collapse": "constant"|"depth" or a
                    "witness": {"table": {label: v}, "n": 0} certificate
    extinction      extinction bracket; "target" switches to the local
                    variant                  -> extinction.csv
    never-hit       never-visit bracket for "target" -> never-hit.csv
    series          first-arrival / visit series at "site", "weight"
                                             -> series.csv
    diagnostics     growth rates, ball sizes, classes, isoperimetry
                                             -> diagnostics.csv, kernel.csv
    simulate        Monte Carlo survival ("mode": "global"|"local"|
                    "strong-local", "start", "target", "truncation",
                    "population_cap")        -> simulate.csv
    sweep           catalog parameter sweep ("param", "values" or
                    "from"/"to"/"steps", "measures")
                                             -> sweep.csv

  settings: {"radius", "N", "tol", "trials", "horizon", "seed"}; any of
  these keys inside a task object override the globals for that task.

CSV columns:
  extinction.csv, never-hit.csv  vertex,label,lower,upper
  series.csv       n,phi_term,gamma_term,phi_partial,gamma_partial
  diagnostics.csv  n,log_return,log_total
  kernel.csv       src,dst,value
  simulate.csv     mode,trials,successes,estimate,lower,upper,extinct,
                   at_horizon,capped,escaped,censored_fraction
  sweep.csv        <param>,<measure>...

Every run writes manifest.json (resolved config + hash; feed it back to
`run` to reproduce byte for byte) and report.json. Seed precedence:
--seed, then BRWLAB_SEED, then the config. Exit codes: 0 success,
2 bad input, 3 a task or fact check failed.)";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"branching random walk laboratory"};
  app.footer(kFooter);
  app.require_subcommand(1);

  auto* cat = app.add_subcommand("catalog", "list the built-in example spaces");
  bool cat_json = false;
  cat->add_flag("--json", cat_json, "machine readable listing");

  auto* val = app.add_subcommand("validate", "check a config and its model, run nothing");
  std::string val_path;
  int val_radius = 0;
  val->add_option("config", val_path, "experiment config (JSON)")->required();
  val->add_option("--radius", val_radius, "override the validation window radius");

  auto* run = app.add_subcommand("run", "execute an experiment config");
  std::string run_path, run_out;
  struct {
    std::uint64_t seed = 0;
    std::int64_t trials = 0;
    int radius = 0;
  } raw;
  bool seed_given = false;
  run->add_option("config", run_path, "experiment config or manifest (JSON)")->required();
  run->add_option("--out", run_out, "output directory (default: \"out\" from the config)");
  run->add_option("--seed", raw.seed, "master seed override")->each([&](const std::string&) {
    seed_given = true;
  });
  run->add_option("--trials", raw.trials, "Monte Carlo trials override");
  run->add_option("--radius", raw.radius, "window radius override");

  auto* rep = app.add_subcommand("reproduce", "recompute the facts of a catalog example");
  std::string rep_id;
  brw::FactCheckBudget budget;
  rep->add_option("id", rep_id, "example id, or \"all\"")->required();
  rep->add_option("--trials", budget.trials, "Monte Carlo trials for sampled facts");
  rep->add_option("--seed", budget.seed, "master seed for sampled facts");

  CLI11_PARSE(app, argc, argv);

  if (cat->parsed()) return cmd_catalog(cat_json);
  if (val->parsed()) return cmd_validate(val_path, val_radius);
  if (run->parsed()) {
    brw::CliOverrides over;
    if (seed_given)
      over.seed = raw.seed;
    else if (const char* env = std::getenv("BRWLAB_SEED"))
      over.seed = std::strtoull(env, nullptr, 10);
    if (run->count("--trials")) over.trials = raw.trials;
    if (run->count("--radius")) over.radius = raw.radius;
    return cmd_run(run_path, run_out, over);
  }
  if (rep->parsed()) return cmd_reproduce(rep_id, budget);
  return 2;
}
