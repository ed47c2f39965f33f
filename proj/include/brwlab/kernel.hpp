#pragma once

#include <memory>
#include <shared_mutex>
#include <string>
#include <vector>

#include "brwlab/model.hpp"

namespace brw {

// First-moment matrix of a model: row x lists (y, expected children placed on
// y per particle at x). Rows are derived from the site laws and cached; for
// rates-based laws the entry is lambda * k(x,y) computed directly from the
// stored rates.
class MomentKernel {
 public:
  explicit MomentKernel(std::shared_ptr<const BRWModel> model);

  const BRWModel& model() const { return *model_; }
  std::shared_ptr<const BRWModel> model_ptr() const { return model_; }

  struct Row {
    std::vector<std::pair<VertexId, double>> entries;
    double sum = 0.0;
  };

  const Row& row(VertexId v) const;  // lazily built; may trigger law generation

  // Entry m(x,y); zero if y is not a child of x.
  double entry(VertexId x, VertexId y) const;

  // Writes "src,dst,value" lines for all rows with tails inside the window
  // (one line per nonzero entry), sorted by (src label, dst label).
  std::string to_csv(const Window& w) const;

 private:
  std::shared_ptr<const BRWModel> model_;
  mutable std::shared_mutex mu_;
  mutable std::vector<std::unique_ptr<Row>> rows_;
};

std::shared_ptr<MomentKernel> make_kernel(std::shared_ptr<const BRWModel> model);

}  // namespace brw
