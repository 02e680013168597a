#pragma once

#include <string>
#include <vector>

#include "needle/graph.hpp"
#include "needle/signature.hpp"
#include "needle/term.hpp"

namespace needle {

std::string label_name(const Label& l, const Signature& sig);

/// Prefix rendering without spaces: `Cons(1,append(xs,y))`. Literal
/// variables print as `#name`; variables without a name print as `_<index>`.
std::string print_term(const Term& t, const Signature& sig, const std::vector<std::string>& var_names);

/// `lhs = rhs`, where a right-hand side reference to an as-pattern binder is
/// rendered as the bound pattern (so collapsing instances read like
/// `H(append(Nil,Cons(y1,y2))) = Cons(y1,y2)`).
std::string print_rule(const Term& lhs, const Term& rhs, const Signature& sig,
                       const std::vector<std::string>& var_names);

/// Unfolded rendering of a graph (shared nodes repeat). Iterative, safe for
/// deep graphs.
std::string print_graph(const ExprGraph& g, const Signature& sig);
std::string print_graph(const ExprGraph& g, NodeIndex from, const Signature& sig);

}  // namespace needle
