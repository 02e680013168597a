#include "needle/heap.hpp"

#include <unordered_map>

#include "needle/error.hpp"

namespace needle {

NodeIndex Heap::alloc(Label label, const NodeIndex* children, std::size_t arity) {
  if (cells_.size() >= kNone - 1) throw EvaluationError("heap exhausted");
  if (arity > 0xffff) throw EvaluationError("node arity too large");
  auto offset = static_cast<std::uint32_t>(edges_.size());
  edges_.insert(edges_.end(), children, children + arity);
  cells_.push_back({label.value, offset, kNone, label.kind, 0, static_cast<std::uint16_t>(arity)});
  return static_cast<NodeIndex>(cells_.size() - 1);
}

void Heap::collect(const std::vector<NodeIndex*>& roots) {
  std::vector<Cell> cells;
  std::vector<NodeIndex> edges;
  std::vector<NodeIndex> remap(cells_.size(), kNone);
  std::vector<std::uint32_t> old_edges;  // per new cell
  cells.reserve(cells_.size() / 2 + 16);

  auto copy = [&](NodeIndex n) {
    n = resolve(n);
    if (remap[n] != kNone) return remap[n];
    Cell c = cells_[n];
    old_edges.push_back(c.edges);
    c.edges = static_cast<std::uint32_t>(edges.size());
    c.forward = kNone;
    edges.resize(edges.size() + c.arity);
    cells.push_back(c);
    return remap[n] = static_cast<NodeIndex>(cells.size() - 1);
  };

  for (NodeIndex* r : roots) *r = copy(*r);
  for (std::size_t scan = 0; scan < cells.size(); ++scan) {
    for (std::size_t i = 0; i < cells[scan].arity; ++i) {
      NodeIndex target = copy(edges_[old_edges[scan] + i]);
      edges[cells[scan].edges + i] = target;
    }
  }
  cells_ = std::move(cells);
  edges_ = std::move(edges);
}

NodeIndex Heap::load(const ExprGraph& g) { return load(g, g.root()); }

NodeIndex Heap::load(const ExprGraph& g, NodeIndex from) {
  std::vector<NodeIndex> placed(g.size(), kNone);
  std::vector<std::pair<NodeIndex, bool>> stack{{from, false}};
  std::vector<NodeIndex> kids;
  while (!stack.empty()) {
    auto [n, expanded] = stack.back();
    stack.pop_back();
    if (placed[n] != kNone) continue;
    const auto& node = g.node(n);
    if (!expanded) {
      stack.emplace_back(n, true);
      for (auto it = node.children.rbegin(); it != node.children.rend(); ++it)
        if (placed[*it] == kNone) stack.emplace_back(*it, false);
      continue;
    }
    kids.clear();
    for (auto c : node.children) kids.push_back(placed[c]);
    placed[n] = alloc(node.label, kids.data(), kids.size());
  }
  return placed[from];
}

ExprGraph Heap::snapshot(NodeIndex root) const {
  ExprGraph g;
  std::unordered_map<NodeIndex, NodeIndex> placed;
  root = resolve(root);
  std::vector<std::pair<NodeIndex, bool>> stack{{root, false}};
  std::vector<NodeIndex> kids;
  while (!stack.empty()) {
    auto [n, expanded] = stack.back();
    stack.pop_back();
    if (placed.contains(n)) continue;
    if (!expanded) {
      stack.emplace_back(n, true);
      for (std::size_t i = arity(n); i-- > 0;) {
        NodeIndex c = child(n, i);
        if (!placed.contains(c)) stack.emplace_back(c, false);
      }
      continue;
    }
    kids.clear();
    for (std::size_t i = 0; i < arity(n); ++i) kids.push_back(placed.at(child(n, i)));
    placed[n] = g.add(label(n), kids, n);
  }
  g.set_root(placed.at(root));
  return g;
}

}  // namespace needle
