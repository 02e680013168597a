#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "needle/graph.hpp"
#include "needle/signature.hpp"
#include "needle/term.hpp"

namespace needle {

/// Hierarchy of patterns organizing the rules of one operation.
///
/// `Branch` children follow the declared constructor order of the inductive
/// position's type. `IntBranch` children are the literal children followed by
/// exactly one default child, whose pattern holds a literal variable at the
/// inductive position (an `Exempt` default when no rule covers other
/// literals). Pattern variables are numbered per tree; `var_types` records
/// their sorts.
struct DefTree {
  enum class Kind { Branch, IntBranch, Rule, Exempt };

  Kind kind = Kind::Exempt;
  Term pattern;
  Path position;                     // inductive position (branch kinds)
  std::vector<DefTree> children;
  std::vector<std::int64_t> literals;  // IntBranch: literal of children[i]; default is last
  std::size_t rule = 0;              // Rule: index into the operation's rules

  bool is_branch() const { return kind == Kind::Branch || kind == Kind::IntBranch; }
};

struct DefTreeInfo {
  DefTree root;
  std::vector<TypeId> var_types;  // sorts of the tree's pattern variables
};

/// Builds the definitional tree of `op` from its rules (in textual order).
/// Throws ValidationError naming NotInductivelySequential or DuplicateRule.
DefTreeInfo build_deftree(const Signature& sig, SymbolId op, const std::vector<SourceRule>& rules);

/// Result of matching an operation-rooted expression against a tree.
struct Descent {
  enum class Kind { Rule, Exempt, Descend };
  Kind kind = Kind::Exempt;
  std::size_t rule = 0;   // Rule
  NodeIndex node = 0;     // Descend: the operation-rooted node at the inductive position
};

/// Deepest tree node whose pattern matches the expression at `at`.
/// `at` must be labeled by the tree's operation. Nodes labeled H/N are not
/// expected; an operation-labeled node at an inductive position yields Descend.
Descent needed_descent(const DefTree& tree, const Signature& sig, const ExprGraph& g, NodeIndex at);

/// Argument positions (0-based) inspected on every root-to-leaf path.
std::vector<std::uint32_t> demanded_positions(const DefTree& tree);

/// Patterns of all nodes in pre-order, used by the disjointness property.
std::vector<const DefTree*> tree_nodes(const DefTree& tree);

/// Indented rendering, one node per line.
std::string render_deftree(const DefTree& tree, const Signature& sig,
                           const std::vector<std::string>& var_names,
                           const std::vector<SourceRule>& rules);

/// Names used for tree pattern variables: x1, x2, ...
std::vector<std::string> deftree_var_names(const DefTreeInfo& info);

}  // namespace needle
