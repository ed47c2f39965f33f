#pragma once

#include <memory>
#include <string>

#include "brwlab/model.hpp"

namespace brw {

enum class Verdict { Survives, Dies, Undecided };
const char* verdict_name(Verdict v);

// Survival of the population restricted to one vertex, decided from moment
// growth at that vertex. Decisive both ways only when the vertex's
// equivalence class is finite and fully visible; otherwise the one-sided
// certificates (truncated class spectral radius, first-arrival partial sums,
// diagonal growth bound) can prove survival but never extinction.
struct LocalSurvivalReport {
  Verdict verdict = Verdict::Undecided;
  std::string reason;
  VertexId x = kNoVertex;
  int radius = 0;
  int horizon = 0;
  bool class_fully_visible = false;
  double class_rho = -1.0;   // spectral radius of the visible class, -1 if acyclic
  double ms_lower = 0.0;     // certified diagonal growth bound
  double phi_partial = 0.0;  // first-arrival partial sum at weight 1
};

LocalSurvivalReport classify_local_survival(const std::shared_ptr<const BRWModel>& model,
                                            VertexId x, int radius, int horizon);

// Global survival for a finite model (typically a quotient): decided by the
// largest spectral radius over classes reachable from the root. At the
// critical value the verdict is extinction.
struct GlobalSurvivalReport {
  Verdict verdict = Verdict::Undecided;
  std::string reason;
  double growth = 0.0;              // max reachable class spectral radius
  double critical_intensity = -1.0; // for rates models: intensity where growth hits 1
};

GlobalSurvivalReport classify_global_finite(const std::shared_ptr<const BRWModel>& model);

}  // namespace brw
