#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "brwlab/common.hpp"
#include "brwlab/law.hpp"

namespace brw {

enum class TimeKind { Discrete, ContinuousCounterpart };

struct ModelOptions {
  // Maximum distance from the root vertex (in the offspring-support digraph)
  // up to which laws may be generated. Vertices at the cap exist as frontier
  // ids; asking for their law raises CapExceededError.
  int cap = (1 << 30);
  double lambda = 1.0;  // intensity multiplying rates-based laws
  TimeKind time = TimeKind::Discrete;
  std::string name = "model";
  // Distance from the root, computed by the builder from the label. Lazy
  // builders must provide this so that escape detection does not depend on
  // discovery order. Finite models may omit it (distances come from BFS).
  std::function<int(const std::string&)> depth_of;
};

// A discrete-time branching random walk: a countable vertex set (materialized
// lazily) together with one reproduction law per vertex. Instances are
// logically immutable; lazy generation is memoized and safe to share across
// threads.
class BRWModel {
 public:
  using LawGenerator = std::function<RawSiteLaw(const std::string& label)>;

  BRWModel(const std::string& root_label, LawGenerator gen, ModelOptions opt);

  // Finite model from an explicit label -> law table. Ids follow breadth-first
  // order from the root; vertices unreachable from the root are appended in
  // listed order.
  static std::shared_ptr<BRWModel> finite(
      const std::string& root_label,
      const std::vector<std::pair<std::string, RawSiteLaw>>& laws, ModelOptions opt);

  VertexId root() const { return 0; }
  int cap() const { return opt_.cap; }
  double lambda() const { return opt_.lambda; }
  TimeKind time_kind() const { return opt_.time; }
  const std::string& name() const { return opt_.name; }
  bool is_finite() const { return finite_; }

  std::size_t generated_count() const;
  const std::string& label(VertexId v) const;
  std::uint64_t site_key(VertexId v) const;
  int depth(VertexId v) const;
  std::optional<VertexId> find(const std::string& label) const;
  VertexId intern(const std::string& label) const;

  bool law_available(VertexId v) const;
  const SiteLaw& law(VertexId v) const;

 private:
  struct Site {
    std::string label;
    std::uint64_t key = 0;
    int depth = 0;
    std::unique_ptr<SiteLaw> law;  // null until generated
  };

  BRWModel() = default;
  VertexId intern_locked(const std::string& label, int depth_hint) const;
  void build_law_locked(VertexId v) const;
  SiteLaw resolve_raw_locked(const RawSiteLaw& raw, int parent_depth) const;

  ModelOptions opt_;
  LawGenerator gen_;
  bool finite_ = false;

  mutable std::shared_mutex mu_;
  mutable std::vector<std::unique_ptr<Site>> sites_;
  mutable std::unordered_map<std::string, VertexId> index_;
};

// A finite window of a model: a ball in the offspring-support digraph,
// sorted by (distance from center, label) so downstream output is stable.
struct Window {
  std::shared_ptr<const BRWModel> model;
  VertexId center = kNoVertex;
  int radius = 0;
  std::vector<VertexId> verts;
  std::vector<int> dist;                  // distance from center, parallel to verts
  std::unordered_map<VertexId, int> pos;  // vertex id -> index into verts

  int index_of(VertexId v) const {
    auto it = pos.find(v);
    return it == pos.end() ? -1 : it->second;
  }
  std::size_t size() const { return verts.size(); }
};

// Expands the ball of the given radius around center. Laws are generated for
// every vertex at distance < radius; vertices at distance == radius are
// included as frontier. Throws CapExceededError if expansion would need laws
// beyond the model cap.
Window make_ball(std::shared_ptr<const BRWModel> model, VertexId center, int radius);

struct ValidationIssue {
  enum class Severity { Note, Warning, Fatal };
  Severity severity;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  double sup_mean_offspring = 0.0;  // largest row mean seen in the window
  bool ok() const {
    for (const auto& i : issues)
      if (i.severity == ValidationIssue::Severity::Fatal) return false;
    return true;
  }
};

// Checks law normalization and the nonsingularity requirement (every
// equivalence class fully visible in the window must contain a vertex whose
// number of children inside the class is != 1 with positive probability).
// Classes touching the window boundary are flagged, not checked.
ValidationReport validate_model(const std::shared_ptr<const BRWModel>& model, int radius);

// Throws ModelError if validation found a fatal problem.
void validate_or_throw(const std::shared_ptr<const BRWModel>& model, int radius);

}  // namespace brw
