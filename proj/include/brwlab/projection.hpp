#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "brwlab/model.hpp"

namespace brw {

// Quotient of a model by a vertex relabeling g. The quotient is a genuine
// model exactly when the pushed-forward reproduction law is the same for
// every vertex in a fiber; then generating functions commute with the
// projection, and finite quotients make global questions computable.
struct ProjectionResult {
  bool exact = false;
  std::string obstruction;  // why the projection was refused, when not exact
  // Largest generating-function mismatch |G(z o g | x) - G_quotient(z | g(x))|
  // over seeded random z; filled only for exact projections.
  double max_residual = 0.0;
  std::shared_ptr<BRWModel> quotient;  // null unless exact
  std::vector<std::pair<std::string, std::string>> fibers;  // class -> representative
};

// Checks fibers over a window of the given radius and builds the quotient
// from one representative per class. Every class label reachable from the
// projected root must have an interior representative in the window.
ProjectionResult project_by_relabeling(const std::shared_ptr<const BRWModel>& model, int radius,
                                       const std::function<std::string(const std::string&)>& g);

}  // namespace brw
