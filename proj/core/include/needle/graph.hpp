#pragma once

#include <cstdint>
#include <vector>

#include "needle/label.hpp"
#include "needle/term.hpp"

namespace needle {

class Signature;

using NodeIndex = std::uint32_t;

struct GraphNode {
  Label label;
  std::vector<NodeIndex> children;  // indices into ExprGraph::nodes
  std::uint64_t id = 0;             // stable node identity
};

/// Single-rooted acyclic graph with sharing. Nodes are stored in a vector;
/// `children` refer to vector indices while `id` is the node identity that
/// survives erasure and snapshotting.
class ExprGraph {
 public:
  NodeIndex add(Label label, std::vector<NodeIndex> children, std::uint64_t id);
  NodeIndex add(Label label, std::vector<NodeIndex> children = {});

  const GraphNode& node(NodeIndex i) const { return nodes_.at(i); }
  const std::vector<GraphNode>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  NodeIndex root() const { return root_; }
  void set_root(NodeIndex r) { root_ = r; }

  /// Index of the node with identity `id`, or -1.
  std::int64_t find_id(std::uint64_t id) const;

 private:
  std::vector<GraphNode> nodes_;
  NodeIndex root_ = 0;
};

/// Builds a graph from a ground term; textual repetition never shares.
ExprGraph graph_from_term(const Term& t);

/// Unfolds a graph into a term (shared nodes are repeated).
Term graph_to_term(const ExprGraph& g);
Term graph_to_term(const ExprGraph& g, NodeIndex from);

/// Copy of the subgraph reachable from `from`, ids preserved.
ExprGraph subgraph(const ExprGraph& g, NodeIndex from);

/// Checks acyclicity, reachability and arities. Throws ValidationError.
void check_well_formed(const ExprGraph& g, const Signature& sig);

/// Removes H and N nodes and un-specializes f^H to f. Ids of surviving nodes
/// (and of f^H nodes, which become f) are preserved; sharing is preserved.
ExprGraph erase(const ExprGraph& g);

/// Fuses every H(f(...)) into f^H(...). Throws ValidationError when an H
/// node's argument is not operation-rooted.
ExprGraph tau(const ExprGraph& g, const Signature& sig);

/// Root-preserving isomorphism respecting labels, child order and sharing.
bool graphs_equal_mod_renaming(const ExprGraph& a, const ExprGraph& b);

/// True iff every reachable node is a constructor or a literal.
bool is_constructor_form(const ExprGraph& g, const Signature& sig);

}  // namespace needle
