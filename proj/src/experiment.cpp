#include "brwlab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "brwlab/classify.hpp"
#include "brwlab/collatz.hpp"
#include "brwlab/digraph.hpp"
#include "brwlab/genfun.hpp"
#include "brwlab/geometry.hpp"
#include "brwlab/kernel.hpp"
#include "brwlab/moments.hpp"
#include "brwlab/projection.hpp"
#include "brwlab/series.hpp"
#include "brwlab/simulate.hpp"

namespace brw {

using nlohmann::json;

namespace {

const std::set<std::string> kTaskNames = {
    "validate",  "classify-local", "classify-global", "extinction", "never-hit",
    "series",    "diagnostics",    "simulate",        "sweep"};

// Setting keys accepted both globally and as per-task overrides.
const std::set<std::string> kSettingKeys = {"radius", "N", "tol", "trials", "horizon", "seed"};

std::string num17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += "\"\"";
    else q += c;
  }
  return q + "\"";
}

[[noreturn]] void bad(const std::string& what) { throw DomainError(what); }

RunSettings settings_from_json(const json& j, RunSettings base) {
  if (!j.is_object()) bad("\"settings\" must be an object");
  for (const auto& [key, val] : j.items()) {
    if (!kSettingKeys.count(key)) bad("unknown setting \"" + key + "\"");
    if (key == "tol") {
      if (!val.is_number()) bad("setting \"tol\" must be a number");
    } else if (!val.is_number_integer() && !val.is_number_unsigned()) {
      bad("setting \"" + key + "\" must be an integer");
    }
  }
  if (j.contains("radius")) base.radius = j.at("radius").get<int>();
  if (j.contains("N")) base.N = j.at("N").get<int>();
  if (j.contains("tol")) base.tol = j.at("tol").get<double>();
  if (j.contains("trials")) base.trials = j.at("trials").get<std::int64_t>();
  if (j.contains("horizon")) base.horizon = j.at("horizon").get<int>();
  if (j.contains("seed")) base.seed = j.at("seed").get<std::uint64_t>();
  if (base.radius < 1) bad("setting \"radius\" must be at least 1");
  if (base.N < 1) bad("setting \"N\" must be at least 1");
  if (base.trials < 1) bad("setting \"trials\" must be at least 1");
  if (base.horizon < 1) bad("setting \"horizon\" must be at least 1");
  if (!(base.tol > 0.0)) bad("setting \"tol\" must be positive");
  return base;
}

json settings_to_json(const RunSettings& s) {
  return json{{"radius", s.radius}, {"N", s.N},       {"tol", s.tol},
              {"trials", s.trials}, {"horizon", s.horizon}, {"seed", s.seed}};
}

// Per-task override: setting keys inside the params object win over globals.
RunSettings task_settings(const RunSettings& base, const json& params) {
  json sj = json::object();
  for (const auto& [key, val] : params.items())
    if (kSettingKeys.count(key)) sj[key] = val;
  return sj.empty() ? base : settings_from_json(sj, base);
}

// ---------------------------------------------------------------------------
// Inline law tables
// ---------------------------------------------------------------------------

std::vector<std::pair<std::string, std::int64_t>> parse_config_counts(const json& j,
                                                                      const std::string& where) {
  if (!j.is_object()) bad(where + ": offspring configuration must be an object {label: count}");
  std::vector<std::pair<std::string, std::int64_t>> out;
  for (const auto& [label, cnt] : j.items()) {
    if (!cnt.is_number_integer() || cnt.get<std::int64_t>() < 1)
      bad(where + ": count for \"" + label + "\" must be a positive integer");
    out.emplace_back(label, cnt.get<std::int64_t>());
  }
  return out;
}

RawSiteLaw parse_law(const json& j, const std::string& label) {
  const std::string where = "law for \"" + label + "\"";
  if (!j.is_object() || j.size() != 1)
    bad(where + " must be an object with exactly one of \"explicit\", \"diffusion\", \"rates\"");
  if (j.contains("explicit")) {
    const json& arr = j.at("explicit");
    if (!arr.is_array() || arr.empty()) bad(where + ": \"explicit\" must be a nonempty array");
    RawExplicitLaw law;
    for (const json& outcome : arr) {
      if (!outcome.is_array() || outcome.size() != 2 || !outcome.at(0).is_number())
        bad(where + ": each explicit outcome is [probability, {label: count}]");
      law.outcomes.emplace_back(parse_config_counts(outcome.at(1), where),
                                outcome.at(0).get<double>());
    }
    return law;
  }
  if (j.contains("diffusion")) {
    const json& dj = j.at("diffusion");
    if (!dj.is_object() || !dj.contains("placement"))
      bad(where + ": \"diffusion\" needs \"placement\" and one of \"pmf\", \"geometric\"");
    RawDiffusionLaw law;
    if (dj.contains("pmf")) {
      FiniteCountLaw cl;
      for (const auto& [cnt, pr] : dj.at("pmf").items()) {
        std::size_t used = 0;
        long long c = std::stoll(cnt, &used);
        if (used != cnt.size() || c < 0) bad(where + ": pmf key \"" + cnt + "\" is not a count");
        cl.pmf.emplace_back(c, pr.get<double>());
      }
      std::sort(cl.pmf.begin(), cl.pmf.end());
      law.count = cl;
    } else if (dj.contains("geometric")) {
      law.count = GeometricCountLaw{dj.at("geometric").get<double>()};
    } else {
      bad(where + ": \"diffusion\" needs one of \"pmf\", \"geometric\"");
    }
    for (const auto& [lbl, pr] : dj.at("placement").items())
      law.placement.emplace_back(lbl, pr.get<double>());
    return law;
  }
  if (j.contains("rates")) {
    RawRatesLaw law;
    for (const auto& [lbl, rate] : j.at("rates").items())
      law.rates.emplace_back(lbl, rate.get<double>());
    return law;
  }
  bad(where + ": unknown law kind");
}

void collect_referenced(const RawSiteLaw& law, std::set<std::string>& out) {
  if (const auto* e = std::get_if<RawExplicitLaw>(&law)) {
    for (const auto& [cfg, pr] : e->outcomes) {
      (void)pr;
      for (const auto& [lbl, cnt] : cfg) {
        (void)cnt;
        out.insert(lbl);
      }
    }
  } else if (const auto* di = std::get_if<RawDiffusionLaw>(&law)) {
    for (const auto& [lbl, pr] : di->placement) {
      (void)pr;
      out.insert(lbl);
    }
  } else if (const auto* ra = std::get_if<RawRatesLaw>(&law)) {
    for (const auto& [lbl, rate] : ra->rates) {
      (void)rate;
      out.insert(lbl);
    }
  }
}

std::shared_ptr<BRWModel> build_inline_model(const json& spec) {
  for (const auto& [key, val] : spec.items()) {
    (void)val;
    if (key != "root" && key != "laws" && key != "lambda" && key != "time" && key != "cap" &&
        key != "name")
      bad("unknown key \"" + key + "\" in inline model spec");
  }
  if (!spec.contains("root") || !spec.at("root").is_string())
    bad("inline model spec needs a \"root\" label");
  if (!spec.contains("laws") || !spec.at("laws").is_object() || spec.at("laws").empty())
    bad("inline model spec needs a nonempty \"laws\" object");
  std::string root = spec.at("root").get<std::string>();

  std::vector<std::pair<std::string, RawSiteLaw>> table;
  std::set<std::string> defined, referenced;
  for (const auto& [label, law] : spec.at("laws").items()) {
    RawSiteLaw raw = parse_law(law, label);
    collect_referenced(raw, referenced);
    table.emplace_back(label, std::move(raw));
    defined.insert(label);
  }
  if (!defined.count(root)) bad("root label \"" + root + "\" has no law entry");
  for (const std::string& lbl : referenced)
    if (!defined.count(lbl)) bad("law table references \"" + lbl + "\" without defining it");

  ModelOptions opt;
  opt.lambda = spec.value("lambda", 1.0);
  opt.name = spec.value("name", std::string("inline"));
  if (spec.contains("cap")) opt.cap = spec.at("cap").get<int>();
  std::string time = spec.value("time", std::string("discrete"));
  if (time == "continuous")
    opt.time = TimeKind::ContinuousCounterpart;
  else if (time != "discrete")
    bad("\"time\" must be \"discrete\" or \"continuous\"");
  return BRWModel::finite(root, table, opt);
}

// ---------------------------------------------------------------------------
// Task execution
// ---------------------------------------------------------------------------

struct TaskCtx {
  std::shared_ptr<BRWModel> model;
  std::shared_ptr<const MomentKernel> kernel;
  RunSettings settings;  // already merged with the task's overrides
  const json* model_spec = nullptr;
};

VertexId resolve_site(const TaskCtx& ctx, const std::string& label) {
  if (ctx.model->is_finite()) {
    auto v = ctx.model->find(label);
    if (!v) bad("unknown vertex label \"" + label + "\"");
    return *v;
  }
  return ctx.model->intern(label);
}

VertexId site_param(const TaskCtx& ctx, const json& p, const char* key) {
  if (!p.contains(key)) return ctx.model->root();
  return resolve_site(ctx, p.at(key).get<std::string>());
}

std::vector<VertexId> target_param(const TaskCtx& ctx, const json& p, bool required) {
  if (!p.contains("target")) {
    if (required) bad("this task needs a \"target\" array of vertex labels");
    return {ctx.model->root()};
  }
  const json& t = p.at("target");
  if (!t.is_array() || t.empty()) bad("\"target\" must be a nonempty array of vertex labels");
  std::vector<VertexId> out;
  for (const json& lbl : t) out.push_back(resolve_site(ctx, lbl.get<std::string>()));
  return out;
}

const char* severity_name(ValidationIssue::Severity s) {
  switch (s) {
    case ValidationIssue::Severity::Note: return "note";
    case ValidationIssue::Severity::Warning: return "warning";
    default: return "fatal";
  }
}

void run_validate(const TaskCtx& ctx, const json&, TaskResult& res) {
  ValidationReport rep = validate_model(ctx.model, ctx.settings.radius);
  json issues = json::array();
  for (const auto& i : rep.issues)
    issues.push_back(json{{"severity", severity_name(i.severity)}, {"message", i.message}});
  res.report = json{{"radius", ctx.settings.radius},
                    {"ok", rep.ok()},
                    {"sup_mean_offspring", rep.sup_mean_offspring},
                    {"issues", issues}};
  res.ok = rep.ok();
  if (!res.ok) res.error = "validation found a fatal problem";
}

void run_classify_local(const TaskCtx& ctx, const json& p, TaskResult& res) {
  VertexId x = site_param(ctx, p, "site");
  LocalSurvivalReport rep =
      classify_local_survival(ctx.model, x, ctx.settings.radius, ctx.settings.N);
  res.report = json{{"site", ctx.model->label(x)},
                    {"radius", rep.radius},
                    {"horizon", rep.horizon},
                    {"verdict", verdict_name(rep.verdict)},
                    {"reason", rep.reason},
                    {"class_fully_visible", rep.class_fully_visible},
                    {"class_rho", rep.class_rho},
                    {"ms_lower", rep.ms_lower},
                    {"phi_partial", rep.phi_partial}};
  res.ok = true;
}

void run_classify_global(const TaskCtx& ctx, const json& p, TaskResult& res) {
  if (p.contains("witness")) {
    const json& wj = p.at("witness");
    if (!wj.is_object() || !wj.contains("table"))
      bad("\"witness\" needs a \"table\" of {label: value}");
    Window w = make_ball(ctx.model, ctx.model->root(), ctx.settings.radius);
    std::vector<double> v(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
      const std::string& lbl = ctx.model->label(w.verts[i]);
      if (!wj.at("table").contains(lbl))
        bad("witness table is missing a value for \"" + lbl + "\"");
      v[i] = wj.at("table").at(lbl).get<double>();
    }
    int n = wj.value("n", 0);
    InequalityCheck chk = n == 0 ? survival_inequality_nonlinear(*ctx.kernel, w, v)
                                 : survival_inequality_linear(*ctx.kernel, w, v, n);
    res.report = json{{"mode", "witness"},
                      {"holds", chk.holds},
                      {"min_slack", chk.min_slack},
                      {"worst", chk.worst == kNoVertex ? "" : ctx.model->label(chk.worst)},
                      {"coords_checked", chk.coords_checked},
                      {"verdict", verdict_name(chk.holds ? Verdict::Survives
                                                         : Verdict::Undecided)}};
    res.ok = true;
    return;
  }

  std::shared_ptr<const BRWModel> finite_model = ctx.model;
  json extra = json::object();
  if (!ctx.model->is_finite()) {
    std::string collapse = p.value("collapse", std::string());
    std::function<std::string(const std::string&)> g;
    if (collapse == "constant") {
      g = [](const std::string&) { return std::string("site"); };
    } else if (collapse == "depth") {
      auto model = ctx.model;
      g = [model](const std::string& lbl) {
        return std::to_string(model->depth(model->intern(lbl)));
      };
    } else {
      bad("classify-global on an infinite model needs \"collapse\" (\"constant\" or \"depth\") "
          "or a \"witness\" table");
    }
    ProjectionResult proj = project_by_relabeling(ctx.model, ctx.settings.radius, g);
    if (!proj.exact) bad("projection refused: " + proj.obstruction);
    finite_model = proj.quotient;
    extra = json{{"mode", "projection"},
                 {"collapse", collapse},
                 {"classes", proj.fibers.size()},
                 {"max_residual", proj.max_residual}};
  } else {
    extra = json{{"mode", "finite"}};
  }
  GlobalSurvivalReport rep = classify_global_finite(finite_model);
  res.report = extra;
  res.report["verdict"] = verdict_name(rep.verdict);
  res.report["reason"] = rep.reason;
  res.report["growth"] = rep.growth;
  res.report["critical_intensity"] = rep.critical_intensity;
  res.ok = true;
}

json bracket_report(const ExtinctionBracket& b) {
  int root_idx = b.window.index_of(b.window.center);
  return json{{"quantity", b.quantity},
              {"radius", b.window.radius},
              {"window_size", b.window.size()},
              {"converged", json{{"lower", b.lower.converged}, {"upper", b.upper.converged}}},
              {"iterations", json{{"lower", b.lower.iterations}, {"upper", b.upper.iterations}}},
              {"root",
               json{{"label", b.window.model->label(b.window.center)},
                    {"lower", b.lower.values[static_cast<std::size_t>(root_idx)]},
                    {"upper", b.upper.values[static_cast<std::size_t>(root_idx)]}}}};
}

void run_extinction(const TaskCtx& ctx, const json& p, TaskResult& res) {
  IterOptions opt;
  opt.tol = ctx.settings.tol;
  if (p.contains("target")) {
    std::vector<VertexId> A = target_param(ctx, p, true);
    LocalExtinctionResult loc =
        local_extinction_vector(ctx.model, A, ctx.settings.radius, opt);
    res.report = bracket_report(loc.q);
    res.files.emplace_back("extinction.csv", extinction_to_csv(loc.q));
    res.ok = loc.q.lower.converged && loc.q.upper.converged;
  } else {
    ExtinctionBracket b = global_extinction_bracket(ctx.model, ctx.settings.radius, opt);
    res.report = bracket_report(b);
    res.files.emplace_back("extinction.csv", extinction_to_csv(b));
    res.ok = b.lower.converged && b.upper.converged;
  }
  if (!res.ok) res.error = "fixed-point iteration did not converge";
}

void run_never_hit(const TaskCtx& ctx, const json& p, TaskResult& res) {
  IterOptions opt;
  opt.tol = ctx.settings.tol;
  std::vector<VertexId> A = target_param(ctx, p, true);
  ExtinctionBracket b = never_hit_bracket(ctx.model, A, ctx.settings.radius, opt);
  res.report = bracket_report(b);
  res.files.emplace_back("never-hit.csv", extinction_to_csv(b));
  res.ok = b.lower.converged && b.upper.converged;
  if (!res.ok) res.error = "fixed-point iteration did not converge";
}

void run_series(const TaskCtx& ctx, const json& p, TaskResult& res) {
  VertexId x = site_param(ctx, p, "site");
  double weight = p.value("weight", 1.0);
  double stop_above = p.value("stop_above", 10.0);
  SeriesResult s = phi_gamma_series(*ctx.kernel, x, weight, ctx.settings.N, stop_above);
  res.report = json{{"site", ctx.model->label(x)},
                    {"weight", weight},
                    {"terms", s.terms},
                    {"phi_sum", s.phi_sum},
                    {"gamma_sum", s.gamma_sum},
                    {"exceeded", s.exceeded}};
  if (std::isnan(s.identity_residual))
    res.report["identity_residual"] = nullptr;
  else
    res.report["identity_residual"] = s.identity_residual;

  std::ostringstream csv;
  csv << "n,phi_term,gamma_term,phi_partial,gamma_partial\n";
  double phi_acc = 0.0, gamma_acc = 0.0;
  for (int n = 0; n <= s.terms; ++n) {
    double phi_term = n == 0 ? 0.0 : s.phi_terms[static_cast<std::size_t>(n - 1)];
    double gamma_term = s.gamma_terms[static_cast<std::size_t>(n)];
    phi_acc += phi_term;
    gamma_acc += gamma_term;
    csv << n << "," << num17(phi_term) << "," << num17(gamma_term) << "," << num17(phi_acc)
        << "," << num17(gamma_acc) << "\n";
  }
  res.files.emplace_back("series.csv", csv.str());
  res.ok = true;
}

void run_diagnostics(const TaskCtx& ctx, const json& p, TaskResult& res) {
  VertexId x = site_param(ctx, p, "site");
  GrowthEstimate g = estimate_growth_rates(*ctx.kernel, x, ctx.settings.N, 8);
  BallGrowth bg = ball_growth(ctx.model, x, ctx.settings.radius);
  DigraphAnalysis an = analyze_digraph(*ctx.kernel, x, ctx.settings.radius, true);
  IsoperimetricEstimate iso = isoperimetric_upper(*ctx.kernel, x, ctx.settings.radius);
  int cls = an.class_of_vertex(x);
  res.report = json{{"site", ctx.model->label(x)},
                    {"N", ctx.settings.N},
                    {"ms_lower", g.ms_lower},
                    {"ms_argmax", g.ms_argmax},
                    {"mw_estimate", g.mw_estimate},
                    {"mw_tail", json::array({g.mw_tail_min, g.mw_tail_max})},
                    {"period_seen", g.period_seen},
                    {"ball_sizes", bg.sizes},
                    {"tail_ratio", bg.tail_ratio},
                    {"looks_subexponential", bg.looks_subexponential},
                    {"classes", an.members.size()},
                    {"class_of_site", cls},
                    {"class_period", an.period[static_cast<std::size_t>(cls)]},
                    {"class_touches_boundary",
                     static_cast<bool>(an.touches_boundary[static_cast<std::size_t>(cls)])},
                    {"iso_upper", iso.value},
                    {"iso_best_radius", iso.best_radius}};

  std::ostringstream csv;
  csv << "n,log_return,log_total\n";
  for (int n = 0; n <= g.diag.horizon(); ++n)
    csv << n << "," << num17(g.diag.log_value(n)) << "," << num17(g.row_sums.log_value(n))
        << "\n";
  res.files.emplace_back("diagnostics.csv", csv.str());

  const Window& w = an.window;
  std::ostringstream kcsv;
  kcsv << "src,dst,value\n";
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w.dist[i] >= w.radius) continue;  // interior rows only
    for (const auto& [child, m] : ctx.kernel->row(w.verts[i]).entries)
      kcsv << csv_quote(ctx.model->label(w.verts[i])) << ","
           << csv_quote(ctx.model->label(child)) << "," << num17(m) << "\n";
  }
  res.files.emplace_back("kernel.csv", kcsv.str());
  res.ok = true;
}

void run_simulate(const TaskCtx& ctx, const json& p, TaskResult& res) {
  std::string mode_name = p.value("mode", std::string("global"));
  SurvivalMode mode;
  if (mode_name == "global")
    mode = SurvivalMode::Global;
  else if (mode_name == "local")
    mode = SurvivalMode::LocalAt;
  else if (mode_name == "strong-local")
    mode = SurvivalMode::StrongLocalAt;
  else
    bad("\"mode\" must be one of \"global\", \"local\", \"strong-local\"");

  VertexId start = site_param(ctx, p, "start");
  TrialPlan plan;
  plan.trials = ctx.settings.trials;
  plan.horizon = ctx.settings.horizon;
  plan.master_seed = ctx.settings.seed;
  plan.population_cap = p.value("population_cap", defaults::population_cap);
  plan.truncation = p.value("truncation", kNoTruncation);
  json targets = json::array();
  if (mode != SurvivalMode::Global) {
    std::vector<VertexId> A = target_param(ctx, p, false);
    for (VertexId v : A) targets.push_back(ctx.model->label(v));
    plan.targets = {A};
  }
  SurvivalEstimate est = estimate_survival(ctx.model, start, plan, mode);
  res.report = json{{"mode", mode_name},
                    {"start", ctx.model->label(start)},
                    {"targets", targets},
                    {"seed", ctx.settings.seed},
                    {"trials", est.ci.trials},
                    {"successes", est.ci.successes},
                    {"estimate", est.ci.estimate},
                    {"lower", est.ci.lower},
                    {"upper", est.ci.upper},
                    {"extinct", est.extinct},
                    {"at_horizon", est.at_horizon},
                    {"capped", est.capped},
                    {"escaped", est.escaped},
                    {"censored_fraction", est.censored_fraction},
                    {"quarter_start", est.quarter_start}};

  std::ostringstream csv;
  csv << "mode,trials,successes,estimate,lower,upper,extinct,at_horizon,capped,escaped,"
         "censored_fraction\n";
  csv << mode_name << "," << est.ci.trials << "," << est.ci.successes << ","
      << num17(est.ci.estimate) << "," << num17(est.ci.lower) << "," << num17(est.ci.upper)
      << "," << est.extinct << "," << est.at_horizon << "," << est.capped << "," << est.escaped
      << "," << num17(est.censored_fraction) << "\n";
  res.files.emplace_back("simulate.csv", csv.str());
  res.ok = true;
}

void run_sweep(const TaskCtx& ctx, const json& p, TaskResult& res) {
  if (!ctx.model_spec || !ctx.model_spec->contains("example"))
    bad("sweep needs a catalog model (\"example\" in the model spec)");
  std::string example = ctx.model_spec->at("example").get<std::string>();
  json base_params = ctx.model_spec->value("params", json::object());
  std::string param = p.value("param", std::string("lambda"));

  std::vector<double> values;
  if (p.contains("values")) {
    for (const json& v : p.at("values")) values.push_back(v.get<double>());
  } else if (p.contains("from") && p.contains("to") && p.contains("steps")) {
    double from = p.at("from").get<double>(), to = p.at("to").get<double>();
    int steps = p.at("steps").get<int>();
    if (steps < 2) bad("sweep \"steps\" must be at least 2");
    for (int i = 0; i < steps; ++i)
      values.push_back(from + (to - from) * static_cast<double>(i) / (steps - 1));
  } else {
    bad("sweep needs \"values\" or \"from\"/\"to\"/\"steps\"");
  }
  if (values.empty()) bad("sweep needs at least one parameter value");

  std::vector<std::string> measures;
  if (p.contains("measures"))
    for (const json& m : p.at("measures")) measures.push_back(m.get<std::string>());
  else
    measures = {"extinction-lower", "extinction-upper"};
  const std::set<std::string> known = {"extinction-lower", "extinction-upper", "ms-lower", "mw",
                                       "survival-mc"};
  for (const std::string& m : measures)
    if (!known.count(m)) bad("unknown sweep measure \"" + m + "\"");

  std::ostringstream csv;
  csv << param;
  for (const std::string& m : measures) csv << "," << m;
  csv << "\n";

  bool wants_bracket = false, wants_growth = false, wants_mc = false;
  for (const std::string& m : measures) {
    wants_bracket |= m.rfind("extinction", 0) == 0;
    wants_growth |= m == "ms-lower" || m == "mw";
    wants_mc |= m == "survival-mc";
  }

  for (double v : values) {
    json pp = base_params;
    pp[param] = v;
    auto model = build_example(example, pp);
    std::map<std::string, double> row;
    if (wants_bracket) {
      IterOptions opt;
      opt.tol = ctx.settings.tol;
      ExtinctionBracket b = global_extinction_bracket(model, ctx.settings.radius, opt);
      int ri = b.window.index_of(b.window.center);
      row["extinction-lower"] = b.lower.values[static_cast<std::size_t>(ri)];
      row["extinction-upper"] = b.upper.values[static_cast<std::size_t>(ri)];
    }
    if (wants_growth) {
      GrowthEstimate g =
          estimate_growth_rates(*make_kernel(model), model->root(), ctx.settings.N, 8);
      row["ms-lower"] = g.ms_lower;
      row["mw"] = g.mw_estimate;
    }
    if (wants_mc) {
      TrialPlan plan;
      plan.trials = ctx.settings.trials;
      plan.horizon = ctx.settings.horizon;
      plan.master_seed = ctx.settings.seed;
      SurvivalEstimate est =
          estimate_survival(model, model->root(), plan, SurvivalMode::Global);
      row["survival-mc"] = est.ci.estimate;
    }
    csv << num17(v);
    for (const std::string& m : measures) csv << "," << num17(row.at(m));
    csv << "\n";
  }
  res.files.emplace_back("sweep.csv", csv.str());
  res.report = json{{"param", param},
                    {"example", example},
                    {"values", values},
                    {"measures", measures},
                    {"rows", values.size()}};
  res.ok = true;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config parsing and the runner
// ---------------------------------------------------------------------------

json ExperimentConfig::resolved() const {
  json tasks_j = json::array();
  for (const TaskSpec& t : tasks) {
    json tj = t.params.is_object() ? t.params : json::object();
    tj["task"] = t.name;
    tasks_j.push_back(tj);
  }
  return json{{"model", model_spec}, {"tasks", tasks_j}, {"settings", settings_to_json(settings)}};
}

ExperimentConfig parse_experiment_config(const json& doc) {
  if (!doc.is_object()) bad("experiment config must be a JSON object");
  if (doc.contains("config")) {
    // manifest form: the resolved config travels under "config"
    return parse_experiment_config(doc.at("config"));
  }
  for (const auto& [key, val] : doc.items()) {
    (void)val;
    if (key != "model" && key != "tasks" && key != "settings" && key != "out")
      bad("unknown key \"" + key + "\" in experiment config");
  }
  if (!doc.contains("model") || !doc.at("model").is_object())
    bad("experiment config needs a \"model\" object");
  if (!doc.contains("tasks") || !doc.at("tasks").is_array() || doc.at("tasks").empty())
    bad("experiment config needs a nonempty \"tasks\" array");

  ExperimentConfig cfg;
  cfg.model_spec = doc.at("model");
  if (doc.contains("settings")) cfg.settings = settings_from_json(doc.at("settings"), cfg.settings);
  if (doc.contains("out")) cfg.out_dir = doc.at("out").get<std::string>();

  for (const json& t : doc.at("tasks")) {
    TaskSpec spec;
    if (t.is_string()) {
      spec.name = t.get<std::string>();
      spec.params = json::object();
    } else if (t.is_object() && t.contains("task") && t.at("task").is_string()) {
      spec.name = t.at("task").get<std::string>();
      spec.params = t;
      spec.params.erase("task");
    } else {
      bad("each task is a name or an object with a \"task\" key");
    }
    if (!kTaskNames.count(spec.name)) bad("unknown task \"" + spec.name + "\"");
    // surface setting typos early rather than at execution time
    (void)task_settings(cfg.settings, spec.params);
    cfg.tasks.push_back(std::move(spec));
  }
  return cfg;
}

std::shared_ptr<BRWModel> build_model_spec(const json& spec) {
  if (!spec.is_object()) bad("model spec must be a JSON object");
  if (spec.contains("example")) {
    for (const auto& [key, val] : spec.items()) {
      (void)val;
      if (key != "example" && key != "params")
        bad("unknown key \"" + key + "\" in catalog model spec");
    }
    return build_example(spec.at("example").get<std::string>(),
                         spec.value("params", json::object()));
  }
  return build_inline_model(spec);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ExperimentResult out;
  json resolved = cfg.resolved();
  char hash[32];
  std::string canon = resolved.dump();
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canon)));
  out.manifest = json{{"config", resolved},
                      {"config_hash", hash},
                      {"seed", cfg.settings.seed},
                      {"version", kToolVersion}};

  std::shared_ptr<BRWModel> model;
  try {
    model = build_model_spec(cfg.model_spec);
  } catch (const std::exception& e) {
    out.exit_code = 2;
    out.error = e.what();
  }

  bool fatal_validation = false;
  if (model) {
    TaskCtx base;
    base.model = model;
    base.kernel = make_kernel(model);
    base.model_spec = &cfg.model_spec;
    std::map<std::string, int> name_count;
    for (const TaskSpec& t : cfg.tasks) {
      TaskResult res;
      res.task = t.name;
      TaskCtx ctx = base;
      try {
        ctx.settings = task_settings(cfg.settings, t.params);
        if (t.name == "validate") run_validate(ctx, t.params, res);
        else if (t.name == "classify-local") run_classify_local(ctx, t.params, res);
        else if (t.name == "classify-global") run_classify_global(ctx, t.params, res);
        else if (t.name == "extinction") run_extinction(ctx, t.params, res);
        else if (t.name == "never-hit") run_never_hit(ctx, t.params, res);
        else if (t.name == "series") run_series(ctx, t.params, res);
        else if (t.name == "diagnostics") run_diagnostics(ctx, t.params, res);
        else if (t.name == "simulate") run_simulate(ctx, t.params, res);
        else if (t.name == "sweep") run_sweep(ctx, t.params, res);
      } catch (const std::exception& e) {
        res.ok = false;
        res.error = e.what();
      }
      if (t.name == "validate" && !res.ok && res.error == "validation found a fatal problem")
        fatal_validation = true;
      // keep several files of one task kind apart
      int& seen = name_count[t.name];
      ++seen;
      if (seen > 1)
        for (auto& [name, contents] : res.files) {
          (void)contents;
          auto dot = name.rfind('.');
          name = name.substr(0, dot) + "-" + std::to_string(seen) + name.substr(dot);
        }
      out.tasks.push_back(std::move(res));
    }
  }

  bool all_ok = model != nullptr;
  json tasks_j = json::array();
  for (const TaskResult& t : out.tasks) {
    json tj = t.report.is_object() ? t.report : json::object();
    tj["task"] = t.task;
    tj["ok"] = t.ok;
    if (!t.error.empty()) tj["error"] = t.error;
    json files = json::array();
    for (const auto& [name, contents] : t.files) {
      (void)contents;
      files.push_back(name);
    }
    tj["files"] = files;
    tasks_j.push_back(tj);
    all_ok = all_ok && t.ok;
  }

  if (out.exit_code != 2) {
    if (fatal_validation) out.exit_code = 2;
    else if (!all_ok) out.exit_code = 3;
  }

  out.report = json{{"version", kToolVersion},
                    {"config_hash", hash},
                    {"model", model ? json{{"name", model->name()},
                                           {"lambda", model->lambda()},
                                           {"time", model->time_kind() == TimeKind::Discrete
                                                        ? "discrete"
                                                        : "continuous"},
                                           {"finite", model->is_finite()}}
                                    : json{{"name", "rejected"},
                                           {"lambda", 0.0},
                                           {"time", "discrete"},
                                           {"finite", false}}},
                    {"ok", all_ok},
                    {"exit_code", out.exit_code},
                    {"tasks", tasks_j}};
  if (!out.error.empty()) out.report["error"] = out.error;
  return out;
}

int run_experiment_files(const json& doc, const std::string& out_dir, const CliOverrides& over,
                         std::ostream& log) {
  ExperimentConfig cfg;
  try {
    cfg = parse_experiment_config(doc);
  } catch (const std::exception& e) {
    log << "config rejected: " << e.what() << "\n";
    return 2;
  }
  if (over.seed) cfg.settings.seed = *over.seed;
  if (over.trials) cfg.settings.trials = *over.trials;
  if (over.radius) cfg.settings.radius = *over.radius;

  ExperimentResult res = run_experiment(cfg);
  if (res.exit_code == 2 && !res.error.empty()) log << "model rejected: " << res.error << "\n";

  std::filesystem::path dir =
      out_dir.empty() ? std::filesystem::path(".") : std::filesystem::path(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    log << "cannot create output directory " << dir.string() << ": " << ec.message() << "\n";
    return 3;
  }
  auto write = [&](const std::string& name, const std::string& contents) {
    std::ofstream f(dir / name, std::ios::binary);
    f << contents;
  };
  write("manifest.json", res.manifest.dump(2) + "\n");
  write("report.json", res.report.dump(2) + "\n");
  for (const TaskResult& t : res.tasks)
    for (const auto& [name, contents] : t.files) write(name, contents);

  for (const TaskResult& t : res.tasks)
    log << (t.ok ? "  ok   " : "  FAIL ") << t.task
        << (t.error.empty() ? "" : ": " + t.error) << "\n";
  log << (res.exit_code == 0 ? "done" : "finished with errors") << ", outputs in "
      << dir.string() << "\n";
  return res.exit_code;
}

ReproduceResult reproduce_example(const std::string& id, const FactCheckBudget& budget) {
  ReproduceResult out;
  out.id = id;
  out.rows = check_example_facts(id, json::object(), budget);
  out.pass = !out.rows.empty();
  for (const FactCheckRow& r : out.rows) out.pass = out.pass && r.pass;
  return out;
}

// ---------------------------------------------------------------------------
// Report schema
// ---------------------------------------------------------------------------

const char* report_schema_text() {
  return R"({
  "type": "object",
  "required": ["version", "config_hash", "model", "ok", "exit_code", "tasks"],
  "properties": {
    "version": {"type": "string"},
    "config_hash": {"type": "string"},
    "model": {
      "type": "object",
      "required": ["name", "lambda", "time", "finite"],
      "properties": {
        "name": {"type": "string"},
        "lambda": {"type": "number"},
        "time": {"enum": ["discrete", "continuous"]},
        "finite": {"type": "boolean"}
      }
    },
    "ok": {"type": "boolean"},
    "exit_code": {"type": "integer"},
    "tasks": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["task", "ok", "files"],
        "properties": {
          "task": {"type": "string"},
          "ok": {"type": "boolean"},
          "files": {"type": "array", "items": {"type": "string"}}
        }
      }
    }
  }
})";
}

bool report_schema_ok(const json& report, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (!report.is_object()) return fail("report is not an object");
  if (!report.contains("version") || !report.at("version").is_string())
    return fail("missing string \"version\"");
  if (!report.contains("config_hash") || !report.at("config_hash").is_string())
    return fail("missing string \"config_hash\"");
  if (!report.contains("ok") || !report.at("ok").is_boolean())
    return fail("missing boolean \"ok\"");
  if (!report.contains("exit_code") || !report.at("exit_code").is_number_integer())
    return fail("missing integer \"exit_code\"");
  if (!report.contains("model") || !report.at("model").is_object())
    return fail("missing object \"model\"");
  const json& m = report.at("model");
  if (!m.contains("name") || !m.at("name").is_string())
    return fail("model is missing string \"name\"");
  if (!m.contains("lambda") || !m.at("lambda").is_number())
    return fail("model is missing number \"lambda\"");
  if (!m.contains("time") ||
      (m.at("time") != json("discrete") && m.at("time") != json("continuous")))
    return fail("model \"time\" must be \"discrete\" or \"continuous\"");
  if (!m.contains("finite") || !m.at("finite").is_boolean())
    return fail("model is missing boolean \"finite\"");
  if (!report.contains("tasks") || !report.at("tasks").is_array())
    return fail("missing array \"tasks\"");
  for (const json& t : report.at("tasks")) {
    if (!t.is_object()) return fail("task entry is not an object");
    if (!t.contains("task") || !t.at("task").is_string())
      return fail("task entry is missing string \"task\"");
    if (!t.contains("ok") || !t.at("ok").is_boolean())
      return fail("task entry is missing boolean \"ok\"");
    if (!t.contains("files") || !t.at("files").is_array())
      return fail("task entry is missing array \"files\"");
  }
  return true;
}

}  // namespace brw
