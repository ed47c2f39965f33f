#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "brwlab/common.hpp"
#include "brwlab/experiment.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string thrown(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

fs::path fresh_dir(const std::string& tag) {
  static int counter = 0;
  fs::path p = fs::temp_directory_path() /
               ("brwlab-test-" + tag + "-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter++));
  fs::remove_all(p);
  return p;
}

std::map<std::string, std::string> slurp_dir(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::ifstream f(entry.path(), std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    out[entry.path().filename().string()] = ss.str();
  }
  return out;
}

// ~2/3 survival single-site process: extinction probability exactly 1/3
json inline_gw() {
  return json::parse(R"({
    "root": "o",
    "laws": {"o": {"explicit": [[0.25, {}], [0.75, {"o": 2}]]}}
  })");
}

int run_binary(const std::string& args, std::string* output = nullptr) {
  const char* bin = std::getenv("BRWLAB_BIN");
  REQUIRE(bin != nullptr);
  fs::path capture = fresh_dir("capture");
  fs::create_directories(capture);
  std::string cmd = std::string(bin) + " " + args + " > " + (capture / "log").string() + " 2>&1";
  int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  if (output) {
    std::ifstream f(capture / "log");
    std::ostringstream ss;
    ss << f.rdbuf();
    *output = ss.str();
  }
  fs::remove_all(capture);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("config parse errors name the offender") {
  auto parse = [](const json& doc) { return [doc] { brw::parse_experiment_config(doc); }; };

  CHECK(thrown(parse(json::array())).find("object") != std::string::npos);
  CHECK(thrown(parse(json{{"tasks", json::array({"validate"})}})).find("model") !=
        std::string::npos);
  CHECK(thrown(parse(json{{"model", inline_gw()}})).find("tasks") != std::string::npos);
  CHECK(thrown(parse(json{{"model", inline_gw()},
                          {"tasks", json::array({"validate"})},
                          {"modle", 1}}))
            .find("modle") != std::string::npos);
  CHECK(thrown(parse(json{{"model", inline_gw()}, {"tasks", json::array({"simulte"})}}))
            .find("simulte") != std::string::npos);
  CHECK(thrown(parse(json{{"model", inline_gw()},
                          {"tasks", json::array({json{{"task", "simulate"}, {"trails", 10}}})}}))
            .empty());  // unknown task params are task business, not settings
  CHECK(thrown(parse(json{{"model", inline_gw()},
                          {"tasks", json::array({"validate"})},
                          {"settings", json{{"radis", 4}}}}))
            .find("radis") != std::string::npos);
  CHECK(thrown(parse(json{{"model", inline_gw()},
                          {"tasks", json::array({"validate"})},
                          {"settings", json{{"trials", 0}}}}))
            .find("trials") != std::string::npos);

  CHECK(thrown([] { brw::build_model_spec(json{{"root", "o"}}); }).find("laws") !=
        std::string::npos);
  CHECK(thrown([] {
          brw::build_model_spec(json::parse(
              R"({"root": "o", "laws": {"o": {"explicit": [[1.0, {"gone": 1}]]}}})"));
        }).find("gone") != std::string::npos);
}

TEST_CASE("inline explicit law reproduces the branching process") {
  brw::ExperimentConfig cfg;
  cfg.model_spec = inline_gw();
  cfg.tasks.push_back({"extinction", json::object()});
  cfg.settings.radius = 2;

  brw::ExperimentResult res = brw::run_experiment(cfg);
  REQUIRE(res.exit_code == 0);
  REQUIRE(res.tasks.size() == 1);
  const json& root = res.tasks[0].report.at("root");
  CHECK(root.at("label") == "o");
  CHECK(root.at("lower").get<double>() == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(root.at("upper").get<double>() == doctest::Approx(1.0 / 3.0).epsilon(1e-9));

  std::string why;
  CHECK(brw::report_schema_ok(res.report, &why));
  CHECK(why.empty());
  CHECK(res.report.at("model").at("name") == "inline");
  CHECK(res.report.at("model").at("finite") == true);
}

TEST_CASE("inline rates law gives the continuous counterpart") {
  // birth rate 2, unit death rate: extinction probability 1/2
  brw::ExperimentConfig cfg;
  cfg.model_spec = json::parse(R"({
    "root": "o",
    "laws": {"o": {"rates": {"o": 1.0}}},
    "lambda": 2.0,
    "time": "continuous",
    "name": "cbp"
  })");
  cfg.tasks.push_back({"extinction", json::object()});
  cfg.settings.radius = 2;

  brw::ExperimentResult res = brw::run_experiment(cfg);
  REQUIRE(res.exit_code == 0);
  const json& root = res.tasks[0].report.at("root");
  CHECK(root.at("lower").get<double>() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(root.at("upper").get<double>() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(res.report.at("model").at("time") == "continuous");
}

TEST_CASE("experiment writes schema conforming outputs") {
  json doc = json{
      {"model", inline_gw()},
      {"tasks", json::array({"validate", "extinction",
                             json{{"task", "series"}, {"N", 30}},
                             json{{"task", "simulate"},
                                  {"trials", 300},
                                  {"horizon", 25},
                                  {"population_cap", 20000}},
                             "diagnostics"})},
      {"settings", json{{"radius", 3}, {"seed", 11}}}};
  fs::path dir = fresh_dir("outputs");
  std::ostringstream log;
  int code = brw::run_experiment_files(doc, dir.string(), {}, log);
  CHECK(code == 0);

  auto files = slurp_dir(dir);
  REQUIRE(files.count("manifest.json"));
  REQUIRE(files.count("report.json"));
  REQUIRE(files.count("extinction.csv"));
  REQUIRE(files.count("series.csv"));
  REQUIRE(files.count("simulate.csv"));
  REQUIRE(files.count("diagnostics.csv"));
  REQUIRE(files.count("kernel.csv"));

  json report = json::parse(files["report.json"]);
  std::string why;
  CHECK(brw::report_schema_ok(report, &why));
  INFO(why);
  CHECK(report.at("exit_code") == 0);
  CHECK(report.at("tasks").size() == 5);

  json manifest = json::parse(files["manifest.json"]);
  CHECK(manifest.at("config_hash") == report.at("config_hash"));
  CHECK(manifest.at("version") == brw::kToolVersion);

  CHECK(files["extinction.csv"].rfind("vertex,label,lower,upper\n", 0) == 0);
  CHECK(files["series.csv"].rfind("n,phi_term,gamma_term,phi_partial,gamma_partial\n", 0) == 0);
  CHECK(files["diagnostics.csv"].rfind("n,log_return,log_total\n", 0) == 0);
  CHECK(files["kernel.csv"].rfind("src,dst,value\n", 0) == 0);
  CHECK(files["simulate.csv"].rfind("mode,trials,successes,estimate,lower,upper,extinct,"
                                    "at_horizon,capped,escaped,censored_fraction\n",
                                    0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("reruns are byte for byte identical") {
  json doc = json{{"model", inline_gw()},
                  {"tasks", json::array({"extinction",
                                         json{{"task", "simulate"},
                                              {"trials", 400},
                                              {"horizon", 20},
                                              {"population_cap", 20000}}})},
                  {"settings", json{{"radius", 2}, {"seed", 5}}}};
  fs::path a = fresh_dir("rerun-a"), b = fresh_dir("rerun-b"), c = fresh_dir("rerun-c");
  std::ostringstream log;
  REQUIRE(brw::run_experiment_files(doc, a.string(), {}, log) == 0);
  REQUIRE(brw::run_experiment_files(doc, b.string(), {}, log) == 0);
  auto fa = slurp_dir(a), fb = slurp_dir(b);
  CHECK(fa == fb);

  // replay from the manifest instead of the original config
  json manifest = json::parse(fa["manifest.json"]);
  REQUIRE(brw::run_experiment_files(manifest, c.string(), {}, log) == 0);
  CHECK(slurp_dir(c) == fa);

  fs::remove_all(a);
  fs::remove_all(b);
  fs::remove_all(c);
}

TEST_CASE("seed overrides land in the manifest") {
  json doc = json{{"model", inline_gw()},
                  {"tasks", json::array({"validate"})},
                  {"settings", json{{"seed", 5}}}};
  fs::path dir = fresh_dir("seed");
  brw::CliOverrides over;
  over.seed = 123;
  std::ostringstream log;
  REQUIRE(brw::run_experiment_files(doc, dir.string(), over, log) == 0);
  json manifest = json::parse(slurp_dir(dir)["manifest.json"]);
  CHECK(manifest.at("seed") == 123);
  CHECK(manifest.at("config").at("settings").at("seed") == 123);
  fs::remove_all(dir);
}

TEST_CASE("model rejection writes a report but config rejection does not") {
  // valid config, nonexistent catalog parameter: manifest + report, exit 2
  json doc = json{{"model", json{{"example", "gw"}, {"params", json{{"p0", 0.25}}}}},
                  {"tasks", json::array({"validate"})}};
  fs::path dir = fresh_dir("reject");
  std::ostringstream log;
  CHECK(brw::run_experiment_files(doc, dir.string(), {}, log) == 2);
  auto files = slurp_dir(dir);
  CHECK(files.count("manifest.json"));
  json report = json::parse(files.at("report.json"));
  CHECK(report.at("exit_code") == 2);
  CHECK(report.at("model").at("name") == "rejected");
  CHECK(report.at("ok") == false);
  fs::remove_all(dir);

  // config rejection happens before any file is written
  fs::path dir2 = fresh_dir("reject2");
  std::ostringstream log2;
  CHECK(brw::run_experiment_files(json{{"tasks", json::array({"validate"})}}, dir2.string(), {},
                                  log2) == 2);
  CHECK(!fs::exists(dir2 / "manifest.json"));
  CHECK(log2.str().find("model") != std::string::npos);
}

TEST_CASE("constant collapse finds the critical intensity") {
  brw::ExperimentConfig cfg;
  cfg.model_spec = json{{"example", "tree"}, {"params", json{{"d", 3}, {"lambda", 1.0}}}};
  cfg.tasks.push_back({"classify-global", json{{"collapse", "constant"}}});
  cfg.settings.radius = 8;
  brw::ExperimentResult res = brw::run_experiment(cfg);
  REQUIRE(res.exit_code == 0);
  const json& rep = res.tasks[0].report;
  CHECK(rep.at("mode") == "projection");
  CHECK(rep.at("classes") == 1);
  CHECK(rep.at("max_residual").get<double>() <= 1e-12);
  CHECK(rep.at("verdict") == "survives");
  CHECK(rep.at("critical_intensity").get<double>() ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-9));

  cfg.model_spec = json{{"example", "zd"}, {"params", json{{"d", 1}, {"lambda", 1.0}}}};
  res = brw::run_experiment(cfg);
  REQUIRE(res.exit_code == 0);
  CHECK(res.tasks[0].report.at("critical_intensity").get<double>() ==
        doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("depth collapse on the lattice is refused") {
  // depth classes keep producing deeper classes, so the quotient never closes
  brw::ExperimentConfig cfg;
  cfg.model_spec = json{{"example", "zd"}, {"params", json{{"d", 1}}}};
  cfg.tasks.push_back({"classify-global", json{{"collapse", "depth"}}});
  cfg.settings.radius = 8;
  brw::ExperimentResult res = brw::run_experiment(cfg);
  CHECK(res.exit_code == 3);
  REQUIRE(res.tasks.size() == 1);
  CHECK(!res.tasks[0].ok);
  CHECK(res.tasks[0].error.find("interior representative") != std::string::npos);
  CHECK(res.report.at("ok") == false);
}

TEST_CASE("witness certificates decide survival") {
  brw::ExperimentConfig cfg;
  cfg.model_spec = inline_gw();
  cfg.settings.radius = 2;
  cfg.tasks.push_back(
      {"classify-global", json{{"witness", json{{"table", json{{"o", 1.0 / 3.0}}}}}}});
  brw::ExperimentResult res = brw::run_experiment(cfg);
  REQUIRE(res.exit_code == 0);
  CHECK(res.tasks[0].report.at("holds") == true);
  CHECK(res.tasks[0].report.at("verdict") == "survives");

  cfg.tasks[0].params = json{{"witness", json{{"table", json{{"o", 0.9}}}}}};
  res = brw::run_experiment(cfg);
  REQUIRE(res.exit_code == 0);
  CHECK(res.tasks[0].report.at("holds") == false);
  CHECK(res.tasks[0].report.at("verdict") == "undecided");
}

TEST_CASE("schema checker rejects a mutilated report") {
  brw::ExperimentConfig cfg;
  cfg.model_spec = inline_gw();
  cfg.tasks.push_back({"validate", json::object()});
  json report = brw::run_experiment(cfg).report;
  std::string why;
  REQUIRE(brw::report_schema_ok(report, &why));

  json broken = report;
  broken.erase("tasks");
  CHECK(!brw::report_schema_ok(broken, &why));
  CHECK(why.find("tasks") != std::string::npos);

  broken = report;
  broken["model"]["time"] = "sometimes";
  CHECK(!brw::report_schema_ok(broken, &why));
  CHECK(why.find("time") != std::string::npos);

  broken = report;
  broken["exit_code"] = "zero";
  CHECK(!brw::report_schema_ok(broken, &why));
  CHECK(why.find("exit_code") != std::string::npos);

  json schema = json::parse(brw::report_schema_text());
  CHECK(schema.at("required").size() == 6);
}

TEST_CASE("the installed binary honors the documented exit codes") {
  std::string out;
  CHECK(run_binary("catalog", &out) == 0);
  CHECK(out.find("gw") != std::string::npos);
  CHECK(out.find("zd") != std::string::npos);
  CHECK(out.find("drift-chain") != std::string::npos);

  fs::path dir = fresh_dir("bin");
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "cfg.json");
    cfg << json{{"model", inline_gw()},
                {"tasks", json::array({"validate", "extinction"})},
                {"settings", json{{"radius", 2}}}}
               .dump();
  }
  CHECK(run_binary("run " + (dir / "cfg.json").string() + " --out " + (dir / "out").string(),
                   &out) == 0);
  CHECK(fs::exists(dir / "out" / "report.json"));

  CHECK(run_binary("validate " + (dir / "cfg.json").string(), &out) == 0);
  CHECK(out.find("ok") != std::string::npos);

  {
    std::ofstream bad(dir / "bad.json");
    bad << "{ not json";
  }
  CHECK(run_binary("run " + (dir / "bad.json").string(), &out) == 2);

  CHECK(run_binary("reproduce gw", &out) == 0);
  CHECK(out.find("pass") != std::string::npos);
  CHECK(out.find("extinction-probability") != std::string::npos);

  CHECK(run_binary("reproduce no-such-example", &out) == 2);
  fs::remove_all(dir);
}
