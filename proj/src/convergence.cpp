#include "brwlab/convergence.hpp"

#include "brwlab/digraph.hpp"
#include "brwlab/perron.hpp"

namespace brw {

ConvergenceSequence convergence_parameter_sequence(std::shared_ptr<const BRWModel> model,
                                                   VertexId x, const std::vector<int>& radii) {
  if (radii.empty()) throw DomainError("need at least one radius");
  ConvergenceSequence out;
  out.x = x;
  out.radii = radii;
  MomentKernel kernel(model);
  for (int r : radii) {
    // full principal submatrix on the ball: frontier rows included
    DigraphAnalysis a = analyze_digraph(kernel, x, r, true);
    int cls = a.class_of_vertex(x);
    double rho = 0.0;
    if (cls >= 0 && a.period[static_cast<std::size_t>(cls)] > 0)
      rho = class_perron(kernel, a, cls).value;
    out.rho.push_back(rho);
    out.R.push_back(rho > 0.0 ? 1.0 / rho : kInf);
  }
  out.monotone_ok = true;
  for (std::size_t k = 1; k < out.R.size(); ++k)
    if (out.R[k] > out.R[k - 1] + 1e-9) out.monotone_ok = false;
  if (out.R.size() >= 2) {
    double a = out.R[out.R.size() - 2], b = out.R.back();
    out.last_gap = (a == kInf || b == kInf) ? kInf : a - b;
  }
  return out;
}

}  // namespace brw
