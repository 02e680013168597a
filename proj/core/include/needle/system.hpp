#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "needle/deftree.hpp"
#include "needle/graph.hpp"
#include "needle/signature.hpp"

namespace needle {

struct Operation {
  SymbolId symbol = 0;
  std::vector<SourceRule> rules;  // textual order
  DefTreeInfo tree;
};

/// A validated, inductively sequential, constructor-based rewrite system.
struct System {
  Signature sig;
  std::vector<Operation> operations;  // user operations in declaration order

  const Operation* find_operation(SymbolId id) const;
  const Operation& operation(SymbolId id) const;
};

/// Parses and validates `.rw` source text. Throws SyntaxError or ValidationError.
System parse_system(std::string_view text);

/// Parses a closed expression over the system's symbols and integer literals.
ExprGraph parse_expr(std::string_view text, const System& sys);

/// Canonical source rendering; `parse_system(print_system(s))` yields `s` again.
std::string print_system(const System& sys);

/// Rendering of an operation's definitional tree.
std::string render_tree(const System& sys, const Operation& op);

}  // namespace needle
