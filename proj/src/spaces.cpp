#include "brwlab/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

namespace brw {

using nlohmann::json;

namespace {

// ---- small label utilities ----

std::string zd_label(const std::vector<long long>& c) {
  std::string s;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(c[i]);
  }
  return s;
}

std::vector<long long> zd_parse(const std::string& label, int d) {
  std::vector<long long> c;
  std::size_t start = 0;
  while (start <= label.size()) {
    std::size_t comma = label.find(',', start);
    std::string part = label.substr(start, comma == std::string::npos ? comma : comma - start);
    c.push_back(std::stoll(part));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (static_cast<int>(c.size()) != d)
    throw ModelError("bad lattice label '" + label + "'");
  return c;
}

std::string num_label(long long n) { return std::to_string(n); }

// ---- parameter plumbing ----

json resolve_params(const json& defaults, const json& user, const std::string& id) {
  json out = defaults;
  if (user.is_null()) return out;
  if (!user.is_object())
    throw DomainError("parameters for example '" + id + "' must be a JSON object");
  for (auto it = user.begin(); it != user.end(); ++it) {
    if (!out.contains(it.key()))
      throw DomainError("unknown parameter '" + it.key() + "' for example '" + id + "'");
    out[it.key()] = it.value();
  }
  return out;
}

double num_param(const json& p, const char* key, const std::string& id) {
  const json& v = p.at(key);
  if (!v.is_number())
    throw DomainError("parameter '" + std::string(key) + "' of example '" + id +
                      "' must be a number");
  return v.get<double>();
}

int int_param(const json& p, const char* key, const std::string& id) {
  const json& v = p.at(key);
  if (!v.is_number_integer())
    throw DomainError("parameter '" + std::string(key) + "' of example '" + id +
                      "' must be an integer");
  return v.get<int>();
}

std::string str_param(const json& p, const char* key, const std::string& id) {
  const json& v = p.at(key);
  if (!v.is_string())
    throw DomainError("parameter '" + std::string(key) + "' of example '" + id +
                      "' must be a string");
  return v.get<std::string>();
}

// pmf given as an object {"count": probability}; must sum to one.
std::vector<std::pair<std::int64_t, double>> pmf_param(const json& p, const char* key,
                                                       const std::string& id) {
  const json& v = p.at(key);
  if (!v.is_object())
    throw DomainError("parameter '" + std::string(key) + "' of example '" + id +
                      "' must map offspring counts to probabilities");
  std::vector<std::pair<std::int64_t, double>> pmf;
  double total = 0.0;
  for (auto it = v.begin(); it != v.end(); ++it) {
    std::int64_t count = 0;
    try {
      std::size_t used = 0;
      count = std::stoll(it.key(), &used);
      if (used != it.key().size()) throw std::invalid_argument("");
    } catch (...) {
      throw DomainError("pmf key '" + it.key() + "' of example '" + id +
                        "' is not an offspring count");
    }
    if (count < 0)
      throw DomainError("pmf of example '" + id + "' requires counts >= 0");
    double prob = it.value().is_number() ? it.value().get<double>() : -1.0;
    if (prob < 0.0 || prob > 1.0)
      throw DomainError("pmf probabilities of example '" + id + "' must lie in [0, 1]");
    pmf.emplace_back(count, prob);
    total += prob;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw DomainError("pmf of example '" + id + "' must sum to 1 (got " +
                      std::to_string(total) + ")");
  std::sort(pmf.begin(), pmf.end());
  return pmf;
}

double pmf_mean(const std::vector<std::pair<std::int64_t, double>>& pmf) {
  double m = 0.0;
  for (const auto& [c, pr] : pmf) m += static_cast<double>(c) * pr;
  return m;
}

// Is the pmf exactly {0: 1-p, 2: p}? Returns p or a negative value.
double binary_pmf_p(const std::vector<std::pair<std::int64_t, double>>& pmf) {
  double p0 = 0.0, p2 = 0.0;
  for (const auto& [c, pr] : pmf) {
    if (pr == 0.0) continue;
    if (c == 0)
      p0 = pr;
    else if (c == 2)
      p2 = pr;
    else
      return -1.0;
  }
  return std::abs(p0 + p2 - 1.0) <= 1e-9 ? p2 : -1.0;
}

// ---- offspring-count sequence of the extinct noext-pair variant ----
// p_i * n_i = 2 with p_i a power of two, so the kernel entry is exactly 2 in
// double arithmetic. Up to depth 30 the counts are 4^(i+1); past that the 64
// bit budget forces a slower dyadic growth, still fast enough that 2^i p_i
// tends to zero, which is what the extinction argument needs.
constexpr int kNoextMaxDepth = 53;

std::int64_t noext_count(int i) {
  if (i <= 30) return std::int64_t(1) << (2 * (i + 1));
  int e = i + 2 + (i + 7) / 8;
  return std::int64_t(1) << e;
}

double noext_p(int i) { return 2.0 / static_cast<double>(noext_count(i)); }

// ---- chain probability sequences ----

double drift_p(long long n) { return 1.0 - std::pow(2.0, -static_cast<double>(n + 1)); }
double binary_drift_up(long long n) { return 1.0 - std::pow(4.0, -static_cast<double>(n)); }
double growing_drift_up(long long n) { return 1.0 - std::pow(4.0, -static_cast<double>(n + 1)); }

int parse_index(const std::string& label) { return static_cast<int>(std::stoll(label)); }

// ---- closed forms shared by descriptors and checkers ----

double gw_binary_extinction(double p) {
  if (p <= 0.5) return 1.0;
  return (1.0 - p) / p;
}

// Eliminating the type-2 coordinate from q1 = phi(q2), q2 = p q1 + 1 - p with
// phi(z) = (1-a) + a z^2 leaves a quadratic in q1.
void two_type_quadratic(double a, double p, double& A, double& B, double& C) {
  A = a * p * p;
  B = 2.0 * a * p * (1.0 - p) - 1.0;
  C = (1.0 - a) + a * (1.0 - p) * (1.0 - p);
}

double two_type_q1(double a, double p) {
  if (2.0 * a * p <= 1.0) return 1.0;
  double A, B, C;
  two_type_quadratic(a, p, A, B, C);
  double disc = B * B - 4.0 * A * C;
  return (-B - std::sqrt(disc)) / (2.0 * A);
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

// ---- catalog table ----

struct CatalogEntry {
  std::string id;
  std::string summary;
  json defaults;
  std::function<void(const json&)> validate;
  std::function<std::shared_ptr<BRWModel>(const json&)> build;
  std::function<std::vector<KnownFact>(const json&)> facts;
};

KnownFact fact(std::string key, std::string statement, std::optional<double> value, double tol,
               std::string derivation) {
  KnownFact f;
  f.key = std::move(key);
  f.statement = std::move(statement);
  f.value = value;
  f.tolerance = tol;
  f.derivation = std::move(derivation);
  return f;
}

void require(bool ok, const std::string& id, const std::string& condition) {
  if (!ok) throw DomainError("example '" + id + "' requires " + condition);
}

// ---- builders used by both the typed API and the catalog ----

std::shared_ptr<BRWModel> build_zd(int d, double lambda, int cap) {
  require(d >= 1 && d <= 3, "zd", "1 <= d <= 3 (windows materialize whole balls, radius^d)");
  require(lambda > 0.0, "zd", "lambda > 0");
  require(cap >= 2, "zd", "cap >= 2");
  ModelOptions opt;
  opt.cap = cap;
  opt.lambda = lambda;
  opt.time = TimeKind::ContinuousCounterpart;
  opt.name = "zd";
  opt.depth_of = [d](const std::string& label) {
    auto c = zd_parse(label, d);
    long long s = 0;
    for (long long x : c) s += std::llabs(x);
    return static_cast<int>(s);
  };
  auto gen = [d](const std::string& label) -> RawSiteLaw {
    auto c = zd_parse(label, d);
    RawRatesLaw law;
    for (int axis = 0; axis < d; ++axis)
      for (int dir : {-1, 1}) {
        auto n = c;
        n[static_cast<std::size_t>(axis)] += dir;
        law.rates.emplace_back(zd_label(n), 1.0);
      }
    return law;
  };
  return std::make_shared<BRWModel>(zd_label(std::vector<long long>(static_cast<std::size_t>(d), 0)),
                                    gen, opt);
}

// Tree labels are digit strings: the root is "", its children are "1".."d",
// and deeper vertices append a digit in "1".."d-1" per forward child. For the
// half-line decoration every tree vertex (root included) has d-1 forward
// children and the ray hangs off the root as "h0", "h1", ...
bool tree_label_ok(const std::string& s, int d, bool uniform) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    int hi = (i == 0 && !uniform) ? d : d - 1;
    if (s[i] < '1' || s[i] > '0' + hi) return false;
  }
  return true;
}

std::shared_ptr<BRWModel> build_tree(int d, double lambda, const TreeOptions& o) {
  const std::string id = "tree";
  require(d >= 3 && d <= 9, id, "3 <= d <= 9 (children are labeled by single digits)");
  require(lambda > 0.0, id, "lambda > 0");
  require(o.cap >= 2, id, "cap >= 2");
  const bool uniform = o.decoration == TreeDecoration::HalfLine;
  if (o.decoration == TreeDecoration::Loop) {
    require(o.loop_rate > 0.0, id, "loop_rate > 0 for the loop decoration");
    require(tree_label_ok(o.loop_at, d, false), id,
            "loop_at to be a tree label (digits, root is \"\")");
  }
  if (o.decoration == TreeDecoration::Clique)
    require(o.clique_degree >= 2, id, "clique_degree >= 2 for the clique decoration");

  ModelOptions opt;
  opt.cap = o.cap;
  opt.lambda = lambda;
  opt.time = TimeKind::ContinuousCounterpart;
  switch (o.decoration) {
    case TreeDecoration::None: opt.name = "tree"; break;
    case TreeDecoration::Loop: opt.name = "tree-loop"; break;
    case TreeDecoration::Clique: opt.name = "tree-clique"; break;
    case TreeDecoration::HalfLine: opt.name = "tree-halfline"; break;
  }
  opt.depth_of = [](const std::string& label) {
    if (!label.empty() && label[0] == 'h') return parse_index(label.substr(1)) + 1;
    if (!label.empty() && label[0] == 'C') {
      return label == "C0" ? 1 : 2;
    }
    return static_cast<int>(label.size());
  };

  TreeOptions oc = o;  // captured copy
  auto gen = [d, oc, uniform, id](const std::string& label) -> RawSiteLaw {
    RawRatesLaw law;
    if (!label.empty() && label[0] == 'h') {
      // ray vertex
      int k = parse_index(label.substr(1));
      law.rates.emplace_back(k == 0 ? std::string() : "h" + std::to_string(k - 1), 1.0);
      law.rates.emplace_back("h" + std::to_string(k + 1), 1.0);
      return law;
    }
    if (!label.empty() && label[0] == 'C') {
      // clique vertex: complete graph on clique_degree + 1 vertices, C0 wired
      // to the tree root
      int i = parse_index(label.substr(1));
      if (i == 0) law.rates.emplace_back("", 1.0);
      for (int j = 0; j <= oc.clique_degree; ++j)
        if (j != i) law.rates.emplace_back("C" + std::to_string(j), 1.0);
      return law;
    }
    if (!tree_label_ok(label, d, uniform)) throw ModelError("bad tree label '" + label + "'");
    if (label.empty()) {
      int children = uniform ? d - 1 : d;
      for (int c = 1; c <= children; ++c) law.rates.emplace_back(std::string(1, char('0' + c)), 1.0);
      if (uniform) law.rates.emplace_back("h0", 1.0);
      if (oc.decoration == TreeDecoration::Clique) law.rates.emplace_back("C0", 1.0);
    } else {
      law.rates.emplace_back(label.substr(0, label.size() - 1), 1.0);
      for (int c = 1; c <= d - 1; ++c) law.rates.emplace_back(label + char('0' + c), 1.0);
    }
    if (oc.decoration == TreeDecoration::Loop && label == oc.loop_at)
      law.rates.emplace_back(label, oc.loop_rate);
    return law;
  };
  return std::make_shared<BRWModel>("", gen, opt);
}

std::shared_ptr<BRWModel> build_radial(const std::vector<int>& period, double lambda, int cap) {
  const std::string id = "radial-tree";
  require(!period.empty(), id, "a nonempty period");
  for (int m : period)
    require(m >= 1 && m <= 9, id, "period entries between 1 and 9 (single-digit labels)");
  require(lambda > 0.0, id, "lambda > 0");
  require(cap >= 2, id, "cap >= 2");
  ModelOptions opt;
  opt.cap = cap;
  opt.lambda = lambda;
  opt.time = TimeKind::ContinuousCounterpart;
  opt.name = "radial-tree";
  opt.depth_of = [](const std::string& label) { return static_cast<int>(label.size()); };
  int b = static_cast<int>(period.size());
  std::vector<int> per = period;
  auto gen = [per, b](const std::string& label) -> RawSiteLaw {
    RawRatesLaw law;
    int k = static_cast<int>(label.size());
    if (k > 0) law.rates.emplace_back(label.substr(0, label.size() - 1), 1.0);
    int m = per[static_cast<std::size_t>(k % b)];
    for (int c = 1; c <= m; ++c) law.rates.emplace_back(label + char('0' + c), 1.0);
    return law;
  };
  return std::make_shared<BRWModel>("", gen, opt);
}

std::shared_ptr<BRWModel> build_strip(double p, int cap) {
  const std::string id = "strip";
  require(p > 0.5 && p < 1.0, id, "1/2 < p < 1 (the rightward front must be supercritical)");
  require(cap >= 3, id, "cap >= 3");
  ModelOptions opt;
  opt.cap = cap;
  opt.time = TimeKind::Discrete;
  opt.name = "strip";
  opt.depth_of = [](const std::string& label) {
    std::size_t comma = label.find(',');
    int i = parse_index(label.substr(0, comma));
    int level = parse_index(label.substr(comma + 1));
    return i + level;
  };
  auto lbl = [](long long i, int level) {
    return std::to_string(i) + "," + std::to_string(level);
  };
  auto gen = [p, lbl](const std::string& label) -> RawSiteLaw {
    std::size_t comma = label.find(',');
    long long i = std::stoll(label.substr(0, comma));
    int level = parse_index(label.substr(comma + 1));
    RawExplicitLaw law;
    if (level == 0) {
      law.outcomes.push_back({{{lbl(i + 1, 0), 2}, {lbl(i, 1), 1}}, p});
    } else if (i > 0) {
      law.outcomes.push_back({{{lbl(i - 1, 1), 2}}, p});
    } else {
      law.outcomes.push_back({{{lbl(0, 1), 1}}, p});
    }
    law.outcomes.push_back({{}, 1.0 - p});
    return law;
  };
  return std::make_shared<BRWModel>("0,0", gen, opt);
}

std::shared_ptr<BRWModel> build_attained_chain(double lambda, int cap) {
  require(lambda > 0.0, "lambda-w-attained-chain", "lambda > 0");
  ModelOptions opt;
  opt.cap = cap;
  opt.lambda = lambda;
  opt.time = TimeKind::ContinuousCounterpart;
  opt.name = "lambda-w-attained-chain";
  opt.depth_of = [](const std::string& label) { return parse_index(label); };
  auto gen = [](const std::string& label) -> RawSiteLaw {
    long long n = std::stoll(label);
    RawRatesLaw law;
    if (n == 0) {
      law.rates.emplace_back("1", 2.0);
    } else {
      double up = (1.0 + 1.0 / static_cast<double>(n));
      law.rates.emplace_back(num_label(n + 1), up * up);
      law.rates.emplace_back(num_label(n - 1), std::pow(3.0, -static_cast<double>(n)));
    }
    return law;
  };
  return std::make_shared<BRWModel>("0", gen, opt);
}

std::shared_ptr<BRWModel> build_noext(const std::string& variant, int cap) {
  const std::string id = "noext-pair";
  require(variant == "A" || variant == "B", id, "variant \"A\" or \"B\"");
  require(cap >= 3 && cap <= kNoextMaxDepth + 1, id,
          "3 <= cap <= " + std::to_string(kNoextMaxDepth + 1) +
              " (offspring counts past that depth exceed 64-bit integers)");
  ModelOptions opt;
  opt.cap = cap;
  opt.time = TimeKind::Discrete;
  opt.name = "noext-" + variant;
  opt.depth_of = [](const std::string& label) { return parse_index(label); };
  bool a_side = variant == "A";
  auto gen = [a_side](const std::string& label) -> RawSiteLaw {
    int i = parse_index(label);
    RawExplicitLaw law;
    if (i == 0) {
      // both variants: four children rightward with probability 1/2
      law.outcomes.push_back({{{"1", 4}}, 0.5});
      law.outcomes.push_back({{}, 0.5});
      return law;
    }
    double p = noext_p(i);
    if (a_side) {
      law.outcomes.push_back({{{num_label(i + 1), noext_count(i)}, {num_label(i - 1), 1}}, p});
      law.outcomes.push_back({{}, 1.0 - p});
    } else {
      law.outcomes.push_back({{{num_label(i + 1), 4}}, 0.5});
      law.outcomes.push_back({{{num_label(i - 1), 1}}, p});
      law.outcomes.push_back({{}, 0.5 - p});
    }
    return law;
  };
  return std::make_shared<BRWModel>("0", gen, opt);
}

std::shared_ptr<BRWModel> build_drift_chain(int cap) {
  ModelOptions opt;
  opt.cap = cap;
  opt.time = TimeKind::Discrete;
  opt.name = "drift-chain";
  opt.depth_of = [](const std::string& label) { return parse_index(label); };
  auto gen = [](const std::string& label) -> RawSiteLaw {
    long long n = std::stoll(label);
    double p = drift_p(n);
    RawExplicitLaw law;
    law.outcomes.push_back({{{num_label(n + 1), 1}}, p});
    // at the origin the "left" move reflects into a self-placement
    law.outcomes.push_back({{{num_label(n > 0 ? n - 1 : 0), 1}}, (1.0 - p) / 2.0});
    law.outcomes.push_back({{}, (1.0 - p) / 2.0});
    return law;
  };
  return std::make_shared<BRWModel>("0", gen, opt);
}

std::shared_ptr<BRWModel> build_binary_drift(double p2, int cap) {
  const std::string id = "binary-drift-chain";
  require(p2 > 0.0 && p2 < 1.0, id, "0 < p2 < 1");
  ModelOptions opt;
  opt.cap = cap;
  opt.time = TimeKind::Discrete;
  opt.name = "binary-drift-chain";
  opt.depth_of = [](const std::string& label) { return parse_index(label); };
  auto gen = [p2](const std::string& label) -> RawSiteLaw {
    long long n = std::stoll(label);
    RawDiffusionLaw law;
    law.count = FiniteCountLaw{{{0, 1.0 - p2}, {2, p2}}};
    if (n == 0) {
      law.placement.emplace_back("1", 1.0);
    } else {
      double up = binary_drift_up(n);
      law.placement.emplace_back(num_label(n + 1), up);
      law.placement.emplace_back(num_label(n - 1), 1.0 - up);
    }
    return law;
  };
  return std::make_shared<BRWModel>("0", gen, opt);
}

std::shared_ptr<BRWModel> build_growing_drift(int cap) {
  ModelOptions opt;
  opt.cap = cap;
  opt.time = TimeKind::Discrete;
  opt.name = "growing-drift-chain";
  opt.depth_of = [](const std::string& label) { return parse_index(label); };
  auto gen = [](const std::string& label) -> RawSiteLaw {
    long long n = std::stoll(label);
    RawDiffusionLaw law;
    law.count = FiniteCountLaw{{{0, 0.25}, {2, 0.75}}};
    if (n == 0) {
      law.placement.emplace_back("0", 0.75);
      law.placement.emplace_back("1", 0.25);
    } else {
      double up = growing_drift_up(n);
      law.placement.emplace_back(num_label(n + 1), up);
      law.placement.emplace_back(num_label(n - 1), 1.0 - up);
    }
    return law;
  };
  return std::make_shared<BRWModel>("0", gen, opt);
}

std::shared_ptr<BRWModel> build_gw(const std::vector<std::pair<std::int64_t, double>>& pmf) {
  RawExplicitLaw law;
  for (const auto& [c, pr] : pmf) {
    if (pr == 0.0) continue;
    if (c == 0)
      law.outcomes.push_back({{}, pr});
    else
      law.outcomes.push_back({{{"o", c}}, pr});
  }
  ModelOptions opt;
  opt.time = TimeKind::Discrete;
  opt.name = "gw";
  return BRWModel::finite("o", {{"o", law}}, opt);
}

std::shared_ptr<BRWModel> build_continuous_bp(double k, double lambda) {
  require(k > 0.0, "continuous-bp", "k > 0");
  require(lambda > 0.0, "continuous-bp", "lambda > 0");
  RawRatesLaw law;
  law.rates.emplace_back("o", k);
  ModelOptions opt;
  opt.lambda = lambda;
  opt.time = TimeKind::ContinuousCounterpart;
  opt.name = "continuous-bp";
  return BRWModel::finite("o", {{"o", law}}, opt);
}

std::shared_ptr<BRWModel> build_two_type(const std::vector<std::pair<std::int64_t, double>>& rho,
                                         double p) {
  require(p > 0.0 && p <= 1.0, "two-type-bp", "0 < p <= 1");
  RawExplicitLaw law1;
  for (const auto& [c, pr] : rho) {
    if (pr == 0.0) continue;
    if (c == 0)
      law1.outcomes.push_back({{}, pr});
    else
      law1.outcomes.push_back({{{"2", c}}, pr});
  }
  RawExplicitLaw law2;
  law2.outcomes.push_back({{{"1", 1}}, p});
  if (p < 1.0) law2.outcomes.push_back({{}, 1.0 - p});
  ModelOptions opt;
  opt.time = TimeKind::Discrete;
  opt.name = "two-type-bp";
  return BRWModel::finite("1", {{"1", law1}, {"2", law2}}, opt);
}

// Square with a branch of the degree-3 tree at each corner and a pendant leaf
// at every internal vertex. Labels: corners "s0".."s3"; branch vertices
// append ".1" then digits in {1,2}; leaves append "L" to their carrier.
struct SquareTreeLabel {
  int corner = 0;
  std::string suffix;  // branch digits after the dot, may be empty
  bool leaf = false;
};

SquareTreeLabel square_parse(const std::string& label) {
  SquareTreeLabel out;
  if (label.size() < 2 || label[0] != 's' || label[1] < '0' || label[1] > '3')
    throw ModelError("bad square-tree label '" + label + "'");
  out.corner = label[1] - '0';
  std::size_t i = 2;
  if (i < label.size() && label[i] == '.') {
    ++i;
    while (i < label.size() && (label[i] == '1' || label[i] == '2')) out.suffix += label[i++];
    if (out.suffix.empty() || out.suffix[0] != '1')
      throw ModelError("bad square-tree label '" + label + "'");
  }
  if (i < label.size() && label[i] == 'L') {
    out.leaf = true;
    ++i;
  }
  if (i != label.size()) throw ModelError("bad square-tree label '" + label + "'");
  return out;
}

std::string square_print(const SquareTreeLabel& l) {
  std::string s = "s" + std::to_string(l.corner);
  if (!l.suffix.empty()) s += "." + l.suffix;
  if (l.leaf) s += "L";
  return s;
}

std::shared_ptr<BRWModel> build_square_tree(double lambda, int cap) {
  require(lambda > 0.0, "square-tree-fgraph", "lambda > 0");
  ModelOptions opt;
  opt.cap = cap;
  opt.lambda = lambda;
  opt.time = TimeKind::ContinuousCounterpart;
  opt.name = "square-tree-fgraph";
  opt.depth_of = [](const std::string& label) {
    SquareTreeLabel l = square_parse(label);
    int base = l.corner == 0 ? 0 : (l.corner == 2 ? 2 : 1);
    return base + static_cast<int>(l.suffix.size()) + (l.leaf ? 1 : 0);
  };
  auto gen = [](const std::string& label) -> RawSiteLaw {
    SquareTreeLabel l = square_parse(label);
    RawRatesLaw law;
    if (l.leaf) {
      SquareTreeLabel carrier = l;
      carrier.leaf = false;
      law.rates.emplace_back(square_print(carrier), 1.0);
      return law;
    }
    SquareTreeLabel leaf = l;
    leaf.leaf = true;
    if (l.suffix.empty()) {
      law.rates.emplace_back("s" + std::to_string((l.corner + 1) % 4), 1.0);
      law.rates.emplace_back("s" + std::to_string((l.corner + 3) % 4), 1.0);
      law.rates.emplace_back(square_print(l) + ".1", 1.0);
    } else {
      SquareTreeLabel parent = l;
      parent.suffix.pop_back();
      law.rates.emplace_back(square_print(parent), 1.0);
      for (char c : {'1', '2'}) {
        SquareTreeLabel child = l;
        child.suffix += c;
        law.rates.emplace_back(square_print(child), 1.0);
      }
    }
    law.rates.emplace_back(square_print(leaf), 1.0);
    return law;
  };
  return std::make_shared<BRWModel>("s0", gen, opt);
}

// ---- fact sheets ----

std::vector<KnownFact> gw_facts(const json& p) {
  auto pmf = pmf_param(p, "pmf", "gw");
  double mean = pmf_mean(pmf);
  std::vector<KnownFact> out;
  out.push_back(fact("mean-offspring", "the mean offspring count is the pmf average", mean, 1e-12,
                     "weighted sum over the probability mass function"));
  double bp = binary_pmf_p(pmf);
  if (bp >= 0.0)
    out.push_back(fact("extinction-probability",
                       "extinction probability of the single-site process", gw_binary_extinction(bp),
                       1e-9,
                       "smallest root of p z^2 - z + (1 - p) = 0 with p = " + fmt(bp) +
                           ", the fixed point of the quadratic generating function"));
  out.push_back(fact("survival-criterion",
                     "the population survives with positive probability iff the mean exceeds one",
                     std::nullopt, 0.0,
                     "single-type branching dichotomy: survival iff mean offspring > 1 for laws "
                     "that are not a point mass at one child"));
  return out;
}

std::vector<KnownFact> cbp_facts(const json& p) {
  double k = num_param(p, "k", "continuous-bp");
  double lambda = num_param(p, "lambda", "continuous-bp");
  std::vector<KnownFact> out;
  out.push_back(fact("extinction-probability",
                     "extinction probability is min(1, 1/(lambda k))",
                     std::min(1.0, 1.0 / (lambda * k)), 1e-9,
                     "the discrete counterpart has geometric offspring with mean lambda k; the "
                     "geometric fixed point is 1/(lambda k) once that mean exceeds one"));
  out.push_back(fact("critical-global", "the critical intensity is 1/k", 1.0 / k, 1e-9,
                     "survival needs mean lambda k > 1; extinction certainly holds at the "
                     "critical intensity itself"));
  return out;
}

std::vector<KnownFact> two_type_facts(const json& p) {
  auto rho = pmf_param(p, "rho", "two-type-bp");
  double pp = num_param(p, "p", "two-type-bp");
  require(pp > 0.0 && pp <= 1.0, "two-type-bp", "0 < p <= 1");
  std::vector<KnownFact> out;
  double mean_rho = pmf_mean(rho);
  out.push_back(fact("survival-criterion",
                     "the process survives iff p times the mean of rho exceeds one", std::nullopt,
                     0.0,
                     "two steps turn each type into a single-type process with mean p * mean(rho) "
                     "= " + fmt(pp * mean_rho) + "; the mean criterion decides"));
  out.push_back(fact("period-two", "returns to either type have period two", std::nullopt, 0.0,
                     "type 1 only begets type 2 and vice versa, so the support digraph is a "
                     "2-cycle"));
  double a = binary_pmf_p(rho);
  if (a >= 0.0) {
    double A, B, C;
    two_type_quadratic(a, pp, A, B, C);
    double q1 = two_type_q1(a, pp);
    double q2 = pp * q1 + 1.0 - pp;
    out.push_back(fact("extinction-type1", "extinction probability starting from type 1", q1, 1e-9,
                       "smaller root of " + fmt(A) + " z^2 + " + fmt(B) + " z + " + fmt(C) +
                           " = 0, obtained by eliminating the type-2 coordinate from the "
                           "fixed-point system"));
    out.push_back(fact("extinction-type2", "extinction probability starting from type 2", q2, 1e-9,
                       "type-2 fixed point p q(1) + 1 - p"));
    if (2.0 * a * pp > 1.0)
      out.push_back(fact("extinction-ordering",
                         "type 1 dies strictly less often than type 2 on survival", std::nullopt,
                         0.0, "p (q2 - q1) = (1 - p)(1 - q2) > 0 whenever the process survives"));
  }
  return out;
}

std::vector<KnownFact> zd_facts(const json& p) {
  int d = int_param(p, "d", "zd");
  double lambda = num_param(p, "lambda", "zd");
  std::vector<KnownFact> out;
  out.push_back(fact("row-sum", "every vertex sends total rate 2 d lambda",
                     2.0 * d * lambda, 1e-12, "each vertex feeds its 2d lattice neighbors at rate "
                     "lambda each"));
  out.push_back(fact("critical-global", "the global critical intensity is 1/(2d)", 1.0 / (2.0 * d),
                     1e-9,
                     "row sums are exactly (2 d lambda)^n, so total growth is 2 d lambda and the "
                     "critical intensity follows"));
  out.push_back(fact("critical-local", "the local critical intensity is also 1/(2d)",
                     1.0 / (2.0 * d), 0.25 / (2.0 * d),
                     "return moments grow like (2 d lambda)^n up to polynomial factors; the check "
                     "certifies an upper bound on the critical point from finite-horizon returns"));
  out.push_back(fact("criticals-coincide",
                     "no intensity separates local from global survival on the lattice",
                     std::nullopt, 0.0,
                     "return growth exhausts total growth: the certified return rate approaches "
                     "the row-sum rate as the horizon grows"));
  out.push_back(fact("ball-growth-polynomial", "balls grow polynomially in the radius",
                     std::nullopt, 0.0, "lattice balls have about (2r)^d / d! vertices"));
  return out;
}

std::vector<KnownFact> tree_facts(const json& p) {
  int d = int_param(p, "d", "tree");
  double lambda = num_param(p, "lambda", "tree");
  (void)lambda;
  std::vector<KnownFact> out;
  double w = 0.2;  // evaluation weight for the return-series fact
  double t = w * d;
  double F = (d - std::sqrt(d * d - 4.0 * (d - 1) * t * t)) / (2.0 * (d - 1));
  out.push_back(fact("critical-global", "the global critical intensity is 1/d", 1.0 / d, 1e-9,
                     "every row sum is d lambda exactly, so total growth is d lambda"));
  out.push_back(fact("critical-local", "the local critical intensity is 1/(2 sqrt(d-1))",
                     1.0 / (2.0 * std::sqrt(d - 1.0)), 0.07 / (2.0 * std::sqrt(d - 1.0)),
                     "return moments of the tree walk grow like (2 sqrt(d-1) lambda)^n up to "
                     "polynomial factors; checked through a certified lower bound on the return "
                     "rate of the radial chain"));
  out.push_back(fact("return-series-closed-form",
                     "the first-arrival series at per-edge weight 0.2 sums to the closed form", F,
                     1e-6,
                     "first-return generating function of the biased tree walk: (d - sqrt(d^2 - "
                     "4 (d-1) t^2)) / (2 (d-1)) at t = 0.2 d"));
  out.push_back(fact("pure-global-window",
                     "intensities in (1/d, 1/(2 sqrt(d-1))] survive globally but nowhere locally",
                     std::nullopt, 0.0,
                     "2 sqrt(d-1) < d iff (d-2)^2 > 0; the certified local upper bound stays "
                     "strictly above 1/d at finite horizons, consistent with the window"));
  return out;
}

std::vector<KnownFact> tree_loop_facts(const json& p) {
  int d = int_param(p, "d", "tree-loop");
  double lambda = num_param(p, "lambda", "tree-loop");
  double rate = num_param(p, "loop_rate", "tree-loop");
  std::vector<KnownFact> out;
  if (lambda * rate > 1.0)
    out.push_back(fact("loop-local-survival", "the loop vertex survives locally",
                       lambda * rate, 1e-12,
                       "the one-step return moment at the loop vertex is lambda * loop_rate > 1, "
                       "a certified survival witness"));
  bool window = lambda > 1.0 / d && lambda <= 1.0 / (2.0 * std::sqrt(d - 1.0)) + 1e-12;
  if (window && lambda * rate > 1.0)
    out.push_back(fact("non-strong-window",
                       "survivors split: the loop vertex survives locally, yet a clear fraction "
                       "of surviving runs never returns to it late",
                       std::nullopt, 0.0,
                       "at this intensity the undecorated tree already survives through escape "
                       "alone, so conditioning on survival cannot force returns to the loop"));
  return out;
}

std::vector<KnownFact> tree_clique_facts(const json& p) {
  int d = int_param(p, "d", "tree-clique");
  double lambda = num_param(p, "lambda", "tree-clique");
  int k = int_param(p, "clique_degree", "tree-clique");
  std::vector<KnownFact> out;
  out.push_back(fact("merged-criticals-bound",
                     "both critical intensities are at most 1/clique_degree", 1.0 / k, 1e-9,
                     "the complete graph on k+1 vertices is a finite piece of the space with "
                     "adjacency spectral radius k; any visible principal submatrix bounds the "
                     "return growth from below, so M_s >= lambda k"));
  if (lambda > 1.0 / k && lambda < 1.0 / d)
    out.push_back(fact("survival-below-plain-global",
                       "local survival already holds below the plain tree's global critical "
                       "intensity 1/d",
                       std::nullopt, 0.0,
                       "the certified class spectral radius at the clique exceeds one at this "
                       "intensity, while the undecorated tree would still die globally"));
  return out;
}

std::vector<KnownFact> tree_halfline_facts(const json& p) {
  int d = int_param(p, "d", "tree-halfline");
  double lambda = num_param(p, "lambda", "tree-halfline");
  (void)lambda;
  std::vector<KnownFact> out;
  if (d == 3)
    out.push_back(fact("ray-harmonic-identity",
                       "the weights 5 - 2^(2-n) are harmonic for the tree part at intensity 1/3",
                       0.0, 1e-12,
                       "direct algebra: (5 - 2^(3-n) + 2 (5 - 2^(1-n))) / 3 = 5 - 2^(2-n) for "
                       "n >= 1 and the neighbor sum at the root gives 2 >= 1, a bounded "
                       "super-solution certifying global survival at 1/3"));
  out.push_back(fact("critical-global", "the global critical intensity is 1/d", 1.0 / d, 1e-12,
                     "tree rows sum to d lambda exactly and ray rows to 2 lambda, so total growth "
                     "is at most d lambda; the bounded harmonic weights certify survival at 1/d"));
  out.push_back(fact("critical-local", "the local critical intensity is 1/(2 sqrt(d-1))",
                     1.0 / (2.0 * std::sqrt(d - 1.0)), 0.07 / (2.0 * std::sqrt(d - 1.0)),
                     "the branch below the root is radially symmetric with d-1 forward children "
                     "everywhere; its lumped chain gives a certified lower bound on the return "
                     "rate valid for the whole space"));
  out.push_back(fact("amenable-appendage",
                     "boundary-to-volume ratios get arbitrarily small along the ray", std::nullopt,
                     0.0,
                     "ray segments have constant boundary mass 2 lambda and linear volume, so the "
                     "isoperimetric upper bound decays like 1/length; the space is amenable even "
                     "though its critical intensities split"));
  return out;
}

std::vector<KnownFact> radial_facts(const json& p) {
  std::vector<int> period = p.at("period").get<std::vector<int>>();
  double lambda = num_param(p, "lambda", "radial-tree");
  std::vector<KnownFact> out;
  out.push_back(fact("branching-structure",
                     "a vertex at distance k has period[k mod b] forward children at unit rate",
                     0.0, 1e-12, "definition of the space, checked row by row on a window"));
  out.push_back(fact("radial-lumping",
                     "return moments at the root equal those of the birth-death chain with the "
                     "same forward counts",
                     0.0, 1e-9,
                     "permuting the children of any vertex preserves the law, so the distance "
                     "process is autonomous"));
  int maxm = *std::max_element(period.begin(), period.end());
  bool b = period.size();
  (void)b;
  if (maxm == 1) {
    out.push_back(fact("subexponential-growth", "the space is a half line: balls grow linearly",
                       std::nullopt, 0.0, "every vertex has exactly one forward child"));
    out.push_back(fact("growth-rates-merge",
                       "return growth and total growth coincide at 2 lambda", 2.0 * lambda,
                       0.06 * lambda,
                       "the half-line walk has return rate 2 lambda and row sums 2 lambda past "
                       "the origin; no pure global phase can exist"));
  } else {
    out.push_back(fact("nonamenable-growth", "balls grow exponentially", std::nullopt, 0.0,
                       "some period entry is at least 2, so spheres multiply along the period"));
    if (period.size() <= 2) {
      double edge = 0.0;
      if (period.size() == 1)
        edge = 2.0 * std::sqrt(static_cast<double>(period[0]));
      else
        edge = std::sqrt(static_cast<double>(period[0])) + std::sqrt(static_cast<double>(period[1]));
      out.push_back(fact("branch-return-rate",
                         "the return growth rate is the band edge of the periodic chain",
                         edge * lambda, 0.02 * edge * lambda,
                         "birth-death chain with periodic couplings sqrt(m_k): its spectral "
                         "radius is " + fmt(edge) + " lambda (period up to 2), approached from "
                         "below by visible-class truncations"));
      if (!(period.size() == 1 && period[0] == 1))
        out.push_back(fact("pure-global-on-branches",
                           "total growth strictly exceeds return growth",
                           std::nullopt, 0.0,
                           "even-step row sums multiply by the full period product while returns "
                           "are capped by the band edge, which is strictly smaller here"));
    }
  }
  return out;
}

std::vector<KnownFact> strip_facts(const json& par) {
  double p = num_param(par, "p", "strip");
  std::vector<KnownFact> out;
  out.push_back(fact("front-extinction",
                     "the rightward front on level 0 is a binary branching process",
                     gw_binary_extinction(p), 1e-9,
                     "level-0 vertices beget two level-0 children with probability p; extinction "
                     "of that front solves p z^2 - z + 1 - p = 0"));
  out.push_back(fact("diagonal-returns-exact",
                     "the only vertex with return mass is the station, where the n-step return "
                     "moment is p^n exactly",
                     0.0, 1e-10,
                     "level 0 moves strictly right, level 1 strictly left except for the "
                     "station's self-loop of weight p"));
  out.push_back(fact("no-local-certificate-level0",
                     "no finite window certifies local survival at the origin, and indeed all "
                     "its return moments vanish",
                     std::nullopt, 0.0,
                     "returns to level 0 are impossible, so every certificate (class radius, "
                     "first-arrival mass, diagonal growth) stays at zero"));
  out.push_back(fact("station-local-survival",
                     "the station is reoccupied at arbitrarily late times with probability "
                     "bounded away from zero",
                     (2.0 * p - 1.0) / p, 0.5 * (2.0 * p - 1.0) / p,
                     "the front survives with probability (2p-1)/p and keeps seeding leftward "
                     "waves that reach the station; the Monte Carlo estimate uses a per-site "
                     "truncation, which can only lower it"));
  out.push_back(fact("subcritical-returns-everywhere",
                     "certified per-vertex return growth bounds never exceed one", 1.0, 1e-12,
                     "the only diagonal sequence is p^n at the station, whose growth rate is "
                     "p < 1; local survival fails at every single vertex"));
  return out;
}

std::vector<KnownFact> attained_facts(const json& p) {
  (void)p;
  std::vector<KnownFact> out;
  out.push_back(fact("kernel-shape", "rates are k(0,1) = 2, k(n,n+1) = (1+1/n)^2, k(n,n-1) = 3^-n",
                     0.0, 1e-12, "definition of the chain, checked row by row"));
  out.push_back(fact("witness-passes-at-one",
                     "at intensity 1 the weights v(0) = 1/2, v(n) = 1/(n+1) satisfy the survival "
                     "inequality with zero slack at the origin",
                     0.0, 1e-12,
                     "(M v)(0) = 2 * 1/2 = 1 = v(0)/(1 - v(0)); for n >= 1 the forward rate "
                     "(1+1/n)^2 against 1/(n+2) strictly dominates 1/n"));
  out.push_back(fact("witness-fails-below-one",
                     "at intensity 0.9 the same weights violate the survival inequality at the "
                     "origin with slack -0.1",
                     -0.1, 1e-9,
                     "(M v)(0) drops to 0.9 while v(0)/(1 - v(0)) stays 1; the critical intensity "
                     "1 is attained with survival"));
  return out;
}

std::vector<KnownFact> noext_facts(const json& p) {
  (void)p;
  std::vector<KnownFact> out;
  out.push_back(fact("kernels-equal", "both variants have exactly the same moment kernel", 0.0,
                     0.0,
                     "p_i n_i = 2 = (1/2) * 4 with all factors powers of two, so the products "
                     "are exact in double arithmetic"));
  out.push_back(fact("rows-mean-at-least-two", "every row mean is at least two", 2.0, 1e-12,
                     "the rightward entry alone carries mass exactly two"));
  out.push_back(fact("variant-a-survival-upper",
                     "variant A dies: the certified survival bound from the radius-40 window is "
                     "at most 0.05",
                     0.05, 0.0,
                     "pin-to-zero truncation bounds extinction from below; any surviving line "
                     "must push through depth k at cost about 2^k p_k, which vanishes"));
  out.push_back(fact("variant-b-survives",
                     "variant B survives with probability at least 0.456 from the origin", 0.45631,
                     0.05,
                     "dropping everything but the rightward quadruples embeds a single-type "
                     "process with extinction solving z = (1 + z^4)/2, about 0.543689"));
  return out;
}

std::vector<KnownFact> drift_facts(const json& p) {
  (void)p;
  // prod_{i>=0} (1 - 2^-(i+1)), the certified survival floor
  double prod = 1.0;
  for (int i = 0; i < 200; ++i) prod *= drift_p(i);
  std::vector<KnownFact> out;
  out.push_back(fact("row-sums-below-one", "every row mean is (1 + p_n)/2 < 1", 0.0, 1e-12,
                     "one child moves up with probability p_n, one reflects or moves down with "
                     "probability (1-p_n)/2, otherwise nothing"));
  out.push_back(fact("survives-globally",
                     "the process survives from the origin with probability at least the "
                     "infinite product of the p_n",
                     prod, 1e-9,
                     "z(n) = 1 - prod_{i>=n} p_i satisfies G(z) <= z, so extinction is at most "
                     "z(0); the floor evaluates to about " + fmt(prod) +
                     " while the true survival, squeezed between the floor and twice the floor, "
                     "sits near 0.47"));
  out.push_back(fact("total-growth-one", "the total growth rate is one", 1.0, 0.05,
                     "row sums approach one so fast that their running product converges; the "
                     "finite-horizon rate approaches one from below like exp(-c/horizon)"));
  return out;
}

std::vector<KnownFact> binary_drift_facts(const json& par) {
  double p2 = num_param(par, "p2", "binary-drift-chain");
  std::vector<KnownFact> out;
  out.push_back(fact("collapse-to-counts",
                     "collapsing all sites to a point projects exactly onto the count process",
                     0.0, 1e-12,
                     "the count law does not depend on the site, so the pushed-forward law is "
                     "well defined and generating functions commute with the collapse"));
  out.push_back(fact("global-extinction-third", "global extinction probability at every site",
                     std::min(1.0, (1.0 - p2) / std::max(p2, 1e-300)), 1e-9,
                     "extinction only depends on the collapsed count process, whose fixed point "
                     "solves p2 z^2 - z + 1 - p2 = 0"));
  out.push_back(fact("drift-sequence-converges",
                     "the weighted drift series sum_{i>=1} 2^i 4^-i converges to one", 1.0, 1e-9,
                     "geometric with ratio 1/2; by the sum-product dichotomy the escape product "
                     "prod (1 - 4^-i)^{2^i} is positive"));
  out.push_back(fact("not-strong-local",
                     "survivors drift away: the conditional late-return estimate at the origin "
                     "is far below one",
                     std::nullopt, 0.0,
                     "the positive escape product lets whole families leave for good, so "
                     "conditioning on survival does not force returns"));
  return out;
}

std::vector<KnownFact> growing_drift_facts(const json& p) {
  (void)p;
  std::vector<KnownFact> out;
  out.push_back(fact("stay-moment-certifies-local",
                     "the origin survives locally: its one-step return moment is 9/8", 1.125,
                     1e-12,
                     "mean count 3/2 times stay probability 3/4 exceeds one, a certified witness"));
  out.push_back(fact("global-extinction-third", "global extinction probability at every site",
                     1.0 / 3.0, 1e-9,
                     "the count law {2: 3/4, 0: 1/4} is site-independent, so extinction collapses "
                     "to the count process with fixed point 1/3"));
  out.push_back(fact("drift-sequence-converges",
                     "the escape series sum_{i>=1} 2^(i+1) 4^-(i+1) converges to one half", 0.5,
                     1e-9,
                     "geometric with ratio 1/2; its convergence funds a positive probability of "
                     "escaping without ever returning"));
  out.push_back(fact("not-strong-local",
                     "local survival at the origin is not strong: a clear fraction of surviving "
                     "runs never returns late",
                     std::nullopt, 0.0,
                     "survivors split into a colony pinned at the origin and families that ride "
                     "the drift; both carry positive probability"));
  return out;
}

std::vector<KnownFact> square_tree_facts(const json& p) {
  double lambda = num_param(p, "lambda", "square-tree-fgraph");
  double perron = (3.0 + std::sqrt(13.0)) / 2.0;
  std::vector<KnownFact> out;
  out.push_back(fact("two-type-collapse",
                     "relabeling to internal/leaf projects exactly onto a two-type process", 0.0,
                     1e-12,
                     "every internal vertex has three internal neighbors and one leaf, every leaf "
                     "one internal neighbor, regardless of position"));
  out.push_back(fact("collapse-perron", "the collapsed kernel has Perron root lambda (3+sqrt(13))/2",
                     lambda * perron, 1e-10,
                     "largest eigenvalue of [[3,1],[1,0]] scaled by the intensity"));
  out.push_back(fact("critical-global", "the global critical intensity is 2/(3+sqrt(13))",
                     2.0 / (3.0 + std::sqrt(13.0)), 1e-9,
                     "global survival happens exactly when the collapsed Perron root exceeds one"));
  out.push_back(fact("degrees-not-regular",
                     "internal vertices have degree four and leaves degree one", 0.0, 1e-12,
                     "so the graph is neither regular nor vertex-transitive, yet collapses onto a "
                     "finite multigraph"));
  out.push_back(fact("nonamenable-growth", "balls grow exponentially", std::nullopt, 0.0,
                     "each branch doubles per level away from the square"));
  return out;
}

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = [] {
    std::vector<CatalogEntry> v;

    v.push_back({"gw",
                 "single-site branching process with an explicit offspring pmf",
                 json{{"pmf", {{"0", 0.25}, {"2", 0.75}}}},
                 [](const json& p) { pmf_param(p, "pmf", "gw"); },
                 [](const json& p) { return build_gw(pmf_param(p, "pmf", "gw")); },
                 gw_facts});

    v.push_back({"continuous-bp",
                 "single site with reproduction rate k (continuous counterpart)",
                 json{{"k", 2.0}, {"lambda", 1.0}},
                 [](const json& p) {
                   require(num_param(p, "k", "continuous-bp") > 0.0, "continuous-bp", "k > 0");
                   require(num_param(p, "lambda", "continuous-bp") > 0.0, "continuous-bp",
                           "lambda > 0");
                 },
                 [](const json& p) {
                   return build_continuous_bp(num_param(p, "k", "continuous-bp"),
                                              num_param(p, "lambda", "continuous-bp"));
                 },
                 cbp_facts});

    v.push_back({"two-type-bp",
                 "two alternating types: type 1 begets type 2 by rho, type 2 begets one type 1 "
                 "with probability p",
                 json{{"rho", {{"0", 0.25}, {"2", 0.75}}}, {"p", 0.8}},
                 [](const json& p) {
                   pmf_param(p, "rho", "two-type-bp");
                   double pp = num_param(p, "p", "two-type-bp");
                   require(pp > 0.0 && pp <= 1.0, "two-type-bp", "0 < p <= 1");
                 },
                 [](const json& p) {
                   return build_two_type(pmf_param(p, "rho", "two-type-bp"),
                                         num_param(p, "p", "two-type-bp"));
                 },
                 two_type_facts});

    v.push_back({"zd",
                 "edge-breeding walk on the integer lattice Z^d",
                 json{{"d", 1}, {"lambda", 0.5}, {"cap", 128}},
                 [](const json& p) {
                   build_zd(int_param(p, "d", "zd"), num_param(p, "lambda", "zd"),
                            int_param(p, "cap", "zd"));
                 },
                 [](const json& p) {
                   return build_zd(int_param(p, "d", "zd"), num_param(p, "lambda", "zd"),
                                   int_param(p, "cap", "zd"));
                 },
                 zd_facts});

    auto tree_build = [](const json& p, TreeDecoration dec, const char* id) {
      TreeOptions o;
      o.decoration = dec;
      o.cap = int_param(p, "cap", id);
      if (dec == TreeDecoration::Loop) {
        o.loop_at = str_param(p, "loop_at", id);
        o.loop_rate = num_param(p, "loop_rate", id);
      }
      if (dec == TreeDecoration::Clique) o.clique_degree = int_param(p, "clique_degree", id);
      return build_tree(int_param(p, "d", id), num_param(p, "lambda", id), o);
    };

    v.push_back({"tree",
                 "regular tree of degree d with unit edge rates",
                 json{{"d", 3}, {"lambda", 1.0}, {"cap", 24}},
                 [tree_build](const json& p) { tree_build(p, TreeDecoration::None, "tree"); },
                 [tree_build](const json& p) { return tree_build(p, TreeDecoration::None, "tree"); },
                 tree_facts});

    v.push_back({"tree-loop",
                 "regular tree with one self-loop of rate loop_rate at loop_at",
                 json{{"d", 3}, {"lambda", 0.34}, {"loop_at", ""}, {"loop_rate", 3.5}, {"cap", 24}},
                 [tree_build](const json& p) { tree_build(p, TreeDecoration::Loop, "tree-loop"); },
                 [tree_build](const json& p) {
                   return tree_build(p, TreeDecoration::Loop, "tree-loop");
                 },
                 tree_loop_facts});

    v.push_back({"tree-clique",
                 "regular tree with a complete graph of degree clique_degree hung off the root",
                 json{{"d", 3}, {"lambda", 0.3}, {"clique_degree", 4}, {"cap", 24}},
                 [tree_build](const json& p) {
                   tree_build(p, TreeDecoration::Clique, "tree-clique");
                 },
                 [tree_build](const json& p) {
                   return tree_build(p, TreeDecoration::Clique, "tree-clique");
                 },
                 tree_clique_facts});

    v.push_back({"tree-halfline",
                 "tree branch with d-1 forward children everywhere plus a half-line ray at the "
                 "root",
                 json{{"d", 3}, {"lambda", 0.34}, {"cap", 64}},
                 [tree_build](const json& p) {
                   tree_build(p, TreeDecoration::HalfLine, "tree-halfline");
                 },
                 [tree_build](const json& p) {
                   return tree_build(p, TreeDecoration::HalfLine, "tree-halfline");
                 },
                 tree_halfline_facts});

    v.push_back({"radial-tree",
                 "rooted tree whose forward branching repeats the given period with the distance",
                 json{{"period", {1, 2}}, {"lambda", 0.4}, {"cap", 600}},
                 [](const json& p) {
                   build_radial(p.at("period").get<std::vector<int>>(),
                                num_param(p, "lambda", "radial-tree"),
                                int_param(p, "cap", "radial-tree"));
                 },
                 [](const json& p) {
                   return build_radial(p.at("period").get<std::vector<int>>(),
                                       num_param(p, "lambda", "radial-tree"),
                                       int_param(p, "cap", "radial-tree"));
                 },
                 radial_facts});

    v.push_back({"strip",
                 "two coupled levels: a rightward binary front that seeds leftward waves into a "
                 "looping station",
                 json{{"p", 0.9}, {"cap", 128}},
                 [](const json& p) {
                   build_strip(num_param(p, "p", "strip"), int_param(p, "cap", "strip"));
                 },
                 [](const json& p) {
                   return build_strip(num_param(p, "p", "strip"), int_param(p, "cap", "strip"));
                 },
                 strip_facts});

    v.push_back({"lambda-w-attained-chain",
                 "birth-death chain whose global critical intensity 1 is attained with survival",
                 json{{"lambda", 1.0}, {"cap", 1024}},
                 [](const json& p) {
                   build_attained_chain(num_param(p, "lambda", "lambda-w-attained-chain"),
                                        int_param(p, "cap", "lambda-w-attained-chain"));
                 },
                 [](const json& p) {
                   return build_attained_chain(num_param(p, "lambda", "lambda-w-attained-chain"),
                                               int_param(p, "cap", "lambda-w-attained-chain"));
                 },
                 attained_facts});

    v.push_back({"noext-pair",
                 "two chains with identical moment kernels but opposite global verdicts",
                 json{{"variant", "A"}, {"cap", 48}},
                 [](const json& p) {
                   build_noext(str_param(p, "variant", "noext-pair"),
                               int_param(p, "cap", "noext-pair"));
                 },
                 [](const json& p) {
                   return build_noext(str_param(p, "variant", "noext-pair"),
                                      int_param(p, "cap", "noext-pair"));
                 },
                 noext_facts});

    v.push_back({"drift-chain",
                 "single-particle chain with all row means below one that still survives",
                 json{{"cap", 640}},
                 [](const json& p) { build_drift_chain(int_param(p, "cap", "drift-chain")); },
                 [](const json& p) { return build_drift_chain(int_param(p, "cap", "drift-chain")); },
                 drift_facts});

    v.push_back({"binary-drift-chain",
                 "site-independent binary offspring riding an accelerating rightward drift",
                 json{{"p2", 0.75}, {"cap", 512}},
                 [](const json& p) {
                   build_binary_drift(num_param(p, "p2", "binary-drift-chain"),
                                      int_param(p, "cap", "binary-drift-chain"));
                 },
                 [](const json& p) {
                   return build_binary_drift(num_param(p, "p2", "binary-drift-chain"),
                                             int_param(p, "cap", "binary-drift-chain"));
                 },
                 binary_drift_facts});

    v.push_back({"growing-drift-chain",
                 "binary offspring with a sticky origin and an accelerating drift: local but "
                 "never strong",
                 json{{"cap", 512}},
                 [](const json& p) { build_growing_drift(int_param(p, "cap", "growing-drift-chain")); },
                 [](const json& p) {
                   return build_growing_drift(int_param(p, "cap", "growing-drift-chain"));
                 },
                 growing_drift_facts});

    v.push_back({"square-tree-fgraph",
                 "square of tree branches with pendant leaves; collapses onto a two-type "
                 "multigraph",
                 json{{"lambda", 0.3}, {"cap", 24}},
                 [](const json& p) {
                   build_square_tree(num_param(p, "lambda", "square-tree-fgraph"),
                                     int_param(p, "cap", "square-tree-fgraph"));
                 },
                 [](const json& p) {
                   return build_square_tree(num_param(p, "lambda", "square-tree-fgraph"),
                                            int_param(p, "cap", "square-tree-fgraph"));
                 },
                 square_tree_facts});

    return v;
  }();
  return entries;
}

const CatalogEntry& entry_or_throw(const std::string& id) {
  for (const CatalogEntry& e : catalog())
    if (e.id == id) return e;
  throw DomainError("unknown example '" + id + "'; see the catalog listing");
}

}  // namespace

// ---- typed builders ----

std::shared_ptr<BRWModel> lattice_Zd(int d, double lambda, int cap) {
  return build_zd(d, lambda, cap);
}

std::shared_ptr<BRWModel> homogeneous_tree(int d, double lambda, const TreeOptions& opt) {
  return build_tree(d, lambda, opt);
}

std::shared_ptr<BRWModel> radial_tree(const std::vector<int>& period, double lambda, int cap) {
  return build_radial(period, lambda, cap);
}

// ---- catalog surface ----

const KnownFact* ExampleDescriptor::fact(const std::string& key) const {
  for (const KnownFact& f : facts)
    if (f.key == key) return &f;
  return nullptr;
}

nlohmann::json ExampleDescriptor::to_json() const {
  json j;
  j["id"] = id;
  j["summary"] = summary;
  j["parameters"] = parameters;
  j["facts"] = json::array();
  for (const KnownFact& f : facts) {
    json jf;
    jf["key"] = f.key;
    jf["statement"] = f.statement;
    if (f.value) jf["value"] = *f.value;
    jf["tolerance"] = f.tolerance;
    jf["derivation"] = f.derivation;
    j["facts"].push_back(jf);
  }
  return j;
}

const std::vector<std::string>& catalog_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> v;
    for (const CatalogEntry& e : catalog()) v.push_back(e.id);
    return v;
  }();
  return ids;
}

bool catalog_has(const std::string& id) {
  for (const CatalogEntry& e : catalog())
    if (e.id == id) return true;
  return false;
}

ExampleDescriptor describe_example(const std::string& id, const nlohmann::json& params) {
  const CatalogEntry& e = entry_or_throw(id);
  ExampleDescriptor d;
  d.id = e.id;
  d.summary = e.summary;
  d.parameters = resolve_params(e.defaults, params, id);
  e.validate(d.parameters);
  d.facts = e.facts(d.parameters);
  return d;
}

std::shared_ptr<BRWModel> build_example(const std::string& id, const nlohmann::json& params) {
  const CatalogEntry& e = entry_or_throw(id);
  json resolved = resolve_params(e.defaults, params, id);
  e.validate(resolved);
  return e.build(resolved);
}

// ---- closed-form sequences ----

double ClosedFormSeq::value(std::int64_t i) const {
  double r = std::pow(ratio, static_cast<double>(i));
  double p = power == 0.0 ? 1.0 : std::pow(static_cast<double>(i), power);
  return scale * r * p;
}

const char* tail_verdict_name(TailVerdict v) {
  switch (v) {
    case TailVerdict::Converges: return "converges";
    case TailVerdict::Diverges: return "diverges";
    default: return "inconclusive";
  }
}

namespace {

// Supremum of a closed-form sequence over i > H, assuming it tends to zero
// (ratio < 1, or ratio == 1 with power < 0). Accounts for an interior peak of
// r^i i^p past the horizon.
double tail_sup(const ClosedFormSeq& s, std::int64_t H) {
  double best = std::abs(s.value(H + 1));
  if (s.ratio > 0.0 && s.ratio < 1.0 && s.power > 0.0) {
    double istar = -s.power / std::log(s.ratio);
    for (std::int64_t i : {static_cast<std::int64_t>(std::floor(istar)),
                           static_cast<std::int64_t>(std::ceil(istar))})
      if (i > H) best = std::max(best, std::abs(s.value(i)));
  }
  return best;
}

}  // namespace

SequenceConditionReport sequence_condition_check(const ClosedFormSeq& alpha,
                                                 const ClosedFormSeq& k, std::int64_t horizon,
                                                 std::int64_t first) {
  if (first < 0) throw DomainError("sequence indices start at 0");
  if (horizon < first) throw DomainError("horizon must be at least the first index");
  if (horizon - first > 2'000'000) throw DomainError("horizon too large (limit 2e6 terms)");
  if (k.scale < 0.0 || k.ratio < 0.0)
    throw DomainError("k_i must be nonnegative: need scale >= 0 and ratio >= 0");
  if (alpha.ratio < 0.0)
    throw DomainError("alpha must have nonnegative ratio");

  SequenceConditionReport rep;
  rep.first = first;
  rep.horizon = horizon;

  // domain: alpha_i < 1 for all i >= first, including past the horizon
  for (std::int64_t i = first; i <= horizon; ++i) {
    double a = alpha.value(i);
    if (!(a < 1.0))
      throw DomainError("alpha_" + std::to_string(i) + " = " + fmt(a) +
                        " violates the requirement alpha_i < 1");
  }
  bool alpha_vanishes =
      alpha.scale == 0.0 || alpha.ratio < 1.0 || (alpha.ratio == 1.0 && alpha.power <= 0.0);
  if (alpha.scale != 0.0 && !alpha_vanishes && !(alpha.ratio == 1.0 && alpha.power == 0.0))
    throw DomainError("alpha grows without bound, so alpha_i < 1 fails eventually");
  double alpha_tail_sup = 0.0;
  if (alpha.scale == 0.0) {
    alpha_tail_sup = 0.0;
  } else if (alpha.ratio == 1.0 && alpha.power == 0.0) {
    alpha_tail_sup = alpha.scale;  // constant sequence
  } else {
    alpha_tail_sup = tail_sup(alpha, horizon);
  }
  if (alpha.scale > 0.0 && !(alpha_tail_sup < 1.0))
    throw DomainError("alpha exceeds 1 beyond the horizon (peak " + fmt(alpha_tail_sup) + ")");

  bool alpha_nonneg = alpha.scale >= 0.0;
  for (std::int64_t i = first; i <= horizon; ++i) {
    double a = alpha.value(i), w = k.value(i);
    rep.partial_sum += w * a;
    if (a < 1.0) rep.partial_product *= std::exp(w * std::log1p(-a));
  }

  // combined term k_i * alpha_i in the same closed-form family
  double s = std::abs(k.scale * alpha.scale);
  double r = k.ratio * alpha.ratio;
  double pw = k.power + alpha.power;

  if (s == 0.0) {
    rep.verdict = TailVerdict::Converges;
    rep.sum_tail_bound = 0.0;
    rep.reason = "all terms vanish";
  } else if (r < 1.0) {
    rep.verdict = TailVerdict::Converges;
    std::int64_t H = horizon;
    if (pw <= 0.0) {
      double head = s * std::pow(r, static_cast<double>(H + 1)) *
                    std::pow(static_cast<double>(H + 1), pw);
      rep.sum_tail_bound = head / (1.0 - r);
      rep.reason = "geometric ratio " + fmt(r) + " with nonincreasing polynomial factor";
    } else {
      double q = r * std::pow(static_cast<double>(H + 2) / static_cast<double>(H + 1), pw);
      if (q < 1.0) {
        double head = s * std::pow(r, static_cast<double>(H + 1)) *
                      std::pow(static_cast<double>(H + 1), pw);
        rep.sum_tail_bound = head / (1.0 - q);
        rep.reason = "geometric ratio dominates the polynomial factor past the horizon";
      } else {
        rep.reason = "converges (ratio " + fmt(r) +
                     " < 1) but the horizon is too small for a certified tail bound";
      }
    }
  } else if (r == 1.0) {
    if (pw < -1.0) {
      rep.verdict = TailVerdict::Converges;
      rep.sum_tail_bound = s * std::pow(static_cast<double>(horizon), pw + 1.0) / (-pw - 1.0);
      rep.reason = "p-series with exponent " + fmt(-pw) + " > 1, integral tail bound";
    } else {
      rep.verdict = TailVerdict::Diverges;
      rep.reason = "p-series with exponent " + fmt(-pw) + " <= 1 diverges";
    }
  } else {
    rep.verdict = TailVerdict::Diverges;
    rep.reason = "terms grow geometrically (ratio " + fmt(r) + " > 1)";
  }

  // does the two-sided dichotomy apply on the tail?
  bool k_tail_ge_one = k.scale > 0.0 && k.ratio >= 1.0 && k.power >= 0.0 &&
                       k.value(std::max<std::int64_t>(first, 1)) >= 1.0;
  rep.equivalence_applies = alpha_nonneg && k_tail_ge_one;

  if (rep.verdict == TailVerdict::Converges && rep.sum_tail_bound && alpha_nonneg &&
      alpha_tail_sup < 1.0) {
    // sum of k ln(1/(1-a)) over the tail is at most tail_sum / (1 - sup a)
    rep.product_lower =
        rep.partial_product * std::exp(-*rep.sum_tail_bound / (1.0 - alpha_tail_sup));
  }
  if (rep.verdict == TailVerdict::Diverges && rep.equivalence_applies)
    rep.reason += "; by the dichotomy the infinite product is zero";
  return rep;
}

}  // namespace brw
