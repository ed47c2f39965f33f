#pragma once

#include <string>
#include <vector>

#include "brwlab/kernel.hpp"

namespace brw {

// Strongly connected components of the offspring-support digraph restricted
// to a window, with per-class periods and a condensation order. A class that
// touches the window edge (member at maximal distance, or member with a child
// outside the window) may extend beyond the ball; such classes carry a flag
// and their period/finiteness must not be trusted.
struct DigraphAnalysis {
  Window window;
  std::vector<int> scc_of;                     // window index -> class id
  std::vector<std::vector<int>> members;       // class id -> window indices
  std::vector<int> period;                     // gcd of cycle lengths; 0 if no internal cycle
  std::vector<char> touches_boundary;          // per class: may extend beyond the window
  std::vector<std::vector<int>> class_children;  // condensation edges (deduped)
  std::vector<int> topo_order;                 // class ids, sources first

  int class_of_vertex(VertexId v) const {
    int i = window.index_of(v);
    return i < 0 ? -1 : scc_of[i];
  }
};

// With include_frontier_rows the offspring laws of vertices at the window
// edge are generated too (the cap permitting) and their in-window edges kept,
// giving the full principal restriction to the ball; by default their
// out-edges are treated as unknown.
DigraphAnalysis analyze_digraph(const MomentKernel& kernel, VertexId center, int radius,
                                bool include_frontier_rows = false);

// Human-readable one-line summary per class, for reports.
std::vector<std::string> describe_classes(const DigraphAnalysis& a);

}  // namespace brw
