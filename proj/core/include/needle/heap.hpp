#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

#include "needle/graph.hpp"
#include "needle/label.hpp"

namespace needle {

/// Arena of graph nodes used by the evaluators.
///
/// A rewrite never overwrites a node: the redex is redirected to its
/// contractum through `forward`, and readers follow the chain. Node indices
/// double as node ids as long as no collection has happened.
class Heap {
 public:
  static constexpr NodeIndex kNone = 0xffffffffu;

  NodeIndex alloc(Label label, const NodeIndex* children, std::size_t arity);
  NodeIndex alloc(Label label, std::initializer_list<NodeIndex> children) {
    return alloc(label, children.begin(), children.size());
  }

  NodeIndex resolve(NodeIndex n) const {
    while (cells_[n].forward != kNone) n = cells_[n].forward;
    return n;
  }
  Label label(NodeIndex n) const { return {cells_[n].kind, cells_[n].value}; }
  LabelKind kind(NodeIndex n) const { return cells_[n].kind; }
  std::int64_t value(NodeIndex n) const { return cells_[n].value; }
  std::size_t arity(NodeIndex n) const { return cells_[n].arity; }
  /// Child `i`, resolved; the stored edge is shortened on the way.
  NodeIndex child(NodeIndex n, std::size_t i) {
    NodeIndex& e = edges_[cells_[n].edges + i];
    e = resolve(e);
    return e;
  }
  NodeIndex child(NodeIndex n, std::size_t i) const { return resolve(edges_[cells_[n].edges + i]); }

  void redirect(NodeIndex from, NodeIndex to) { cells_[from].forward = to; }

  /// Set once a node's subgraph is known to contain no H, N or f^H node.
  bool finished(NodeIndex n) const { return cells_[n].flags & kFinished; }
  void set_finished(NodeIndex n) { cells_[n].flags |= kFinished; }

  std::size_t size() const { return cells_.size(); }

  /// Copies the nodes reachable from `roots` into fresh storage, resolving
  /// forwards; each root is updated to its new index.
  void collect(const std::vector<NodeIndex*>& roots);

  /// Copies an ExprGraph into the heap; returns the new root.
  NodeIndex load(const ExprGraph& g);
  NodeIndex load(const ExprGraph& g, NodeIndex from);

  /// Reachable subgraph of `root` as an ExprGraph; ids are heap indices.
  ExprGraph snapshot(NodeIndex root) const;

 private:
  static constexpr std::uint8_t kFinished = 1;

  struct Cell {
    std::int64_t value;
    std::uint32_t edges;
    NodeIndex forward;
    LabelKind kind;
    std::uint8_t flags;
    std::uint16_t arity;
  };

  std::vector<Cell> cells_;
  std::vector<NodeIndex> edges_;
};

}  // namespace needle
