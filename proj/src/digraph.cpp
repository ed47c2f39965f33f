#include "brwlab/digraph.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>
#include <sstream>

namespace brw {

namespace {

// Iterative Tarjan over the window-restricted digraph.
struct TarjanState {
  const std::vector<std::vector<int>>& adj;
  std::vector<int> index, low, comp;
  std::vector<char> on_stack;
  std::vector<int> stack;
  int next_index = 0, comp_count = 0;

  explicit TarjanState(const std::vector<std::vector<int>>& a)
      : adj(a), index(a.size(), -1), low(a.size(), 0), comp(a.size(), -1), on_stack(a.size(), 0) {}

  void run(int root) {
    struct Frame {
      int v;
      std::size_t child;
    };
    std::vector<Frame> frames{{root, 0}};
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!frames.empty()) {
      Frame& f = frames.back();
      if (f.child < adj[f.v].size()) {
        int w = adj[f.v][f.child++];
        if (index[w] < 0) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = 1;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
      } else {
        if (low[f.v] == index[f.v]) {
          for (;;) {
            int w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            comp[w] = comp_count;
            if (w == f.v) break;
          }
          ++comp_count;
        }
        int v = f.v;
        frames.pop_back();
        if (!frames.empty()) {
          int parent = frames.back().v;
          low[parent] = std::min(low[parent], low[v]);
        }
      }
    }
  }
};

}  // namespace

DigraphAnalysis analyze_digraph(const MomentKernel& kernel, VertexId center, int radius,
                                bool include_frontier_rows) {
  DigraphAnalysis a;
  a.window = make_ball(kernel.model_ptr(), center, radius);
  const Window& w = a.window;
  const bool finite = kernel.model().is_finite();

  std::size_t n = w.size();
  std::vector<std::vector<int>> adj(n);
  std::vector<char> edge_out(n, 0);  // has a child outside the window
  std::vector<char> expanded(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (w.dist[i] >= radius && !finite && !include_frontier_rows)
      continue;  // frontier: out-edges unknown
    expanded[i] = 1;
    for (const auto& [child, m] : kernel.row(w.verts[i]).entries) {
      if (m == 0.0) continue;
      int j = w.index_of(child);
      if (j >= 0)
        adj[i].push_back(j);
      else
        edge_out[i] = 1;
    }
  }

  TarjanState tarjan(adj);
  for (std::size_t i = 0; i < n; ++i)
    if (tarjan.index[static_cast<int>(i)] < 0) tarjan.run(static_cast<int>(i));

  // Tarjan numbers components in reverse topological order; relabel so that
  // classes appear in (distance, label) order of their first member.
  int count = tarjan.comp_count;
  std::vector<int> relabel(count, -1);
  int next = 0;
  a.scc_of.assign(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    int c = tarjan.comp[i];
    if (relabel[c] < 0) relabel[c] = next++;
    a.scc_of[i] = relabel[c];
  }
  a.members.assign(count, {});
  for (std::size_t i = 0; i < n; ++i) a.members[a.scc_of[i]].push_back(static_cast<int>(i));

  // Direct uncertainty: a vertex whose out-edges were not (or not fully)
  // enumerated. Spread to whole classes below, once the condensation exists.
  a.touches_boundary.assign(count, 0);
  for (std::size_t i = 0; i < n; ++i) {
    bool unknown_out = !expanded[i] || edge_out[i] || (!finite && w.dist[i] >= radius);
    if (unknown_out) a.touches_boundary[a.scc_of[i]] = 1;
  }

  // Period per class: gcd of (level(u) + 1 - level(v)) over internal edges,
  // with levels from a BFS inside the class. 0 means no internal cycle.
  a.period.assign(count, 0);
  for (int c = 0; c < count; ++c) {
    const auto& mem = a.members[c];
    if (mem.size() == 1) {
      int i = mem[0];
      for (int j : adj[i])
        if (j == i) a.period[c] = 1;  // self-loop
      continue;
    }
    std::vector<int> level(n, -1);
    std::deque<int> queue{mem[0]};
    level[mem[0]] = 0;
    int g = 0;
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      for (int v : adj[u]) {
        if (a.scc_of[v] != c) continue;
        if (level[v] < 0) {
          level[v] = level[u] + 1;
          queue.push_back(v);
        } else {
          g = std::gcd(g, std::abs(level[u] + 1 - level[v]));
        }
      }
    }
    a.period[c] = g;
  }

  // Condensation edges and a topological order (sources first).
  a.class_children.assign(count, {});
  std::vector<std::set<int>> kids(count);
  std::vector<int> indeg(count, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (int j : adj[i]) {
      int ci = a.scc_of[i], cj = a.scc_of[j];
      if (ci != cj && kids[ci].insert(cj).second) ++indeg[cj];
    }
  for (int c = 0; c < count; ++c) a.class_children[c] = {kids[c].begin(), kids[c].end()};
  std::deque<int> ready;
  for (int c = 0; c < count; ++c)
    if (indeg[c] == 0) ready.push_back(c);
  while (!ready.empty()) {
    int c = ready.front();
    ready.pop_front();
    a.topo_order.push_back(c);
    for (int d : a.class_children[c])
      if (--indeg[d] == 0) ready.push_back(d);
  }

  // A class is certainly complete only when nothing reachable from it has
  // unknown out-edges; an unexplored vertex downstream could feed back into
  // the class in the full graph. Reverse topological sweep pulls the flag up.
  for (auto it = a.topo_order.rbegin(); it != a.topo_order.rend(); ++it)
    for (int child : a.class_children[*it])
      if (a.touches_boundary[child]) a.touches_boundary[*it] = 1;

  return a;
}

std::vector<std::string> describe_classes(const DigraphAnalysis& a) {
  std::vector<std::string> out;
  const auto& model = *a.window.model;
  for (std::size_t c = 0; c < a.members.size(); ++c) {
    std::ostringstream line;
    line << "class " << c << " {";
    for (std::size_t k = 0; k < a.members[c].size(); ++k) {
      if (k > 0) line << ", ";
      if (k == 6 && a.members[c].size() > 8) {
        line << "... " << a.members[c].size() << " vertices";
        break;
      }
      line << model.label(a.window.verts[a.members[c][k]]);
    }
    line << "} period=" << a.period[c];
    if (a.touches_boundary[c]) line << " (touches window boundary)";
    out.push_back(line.str());
  }
  return out;
}

}  // namespace brw
