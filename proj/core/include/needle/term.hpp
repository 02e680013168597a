#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "needle/label.hpp"

namespace needle {

/// Position inside a term: sequence of 0-based argument indices.
using Path = std::vector<std::uint32_t>;

/// Tree-shaped rule side (pattern or right-hand side).
///
/// Rule sides are trees; repeated occurrences of one variable index denote a
/// single shared node. A non-variable pattern position may carry a `binder`
/// variable so that a right-hand side can refer to the matched node itself
/// (as-pattern); this is how collapsing rule instances avoid copying.
struct Term {
  Label label;
  std::vector<Term> args;
  std::int32_t binder = -1;

  static Term var(std::uint32_t index) { return {Label::var(index), {}, -1}; }
  static Term lit_var(std::uint32_t index) { return {Label::lit_var(index), {}, -1}; }
  static Term literal(std::int64_t v) { return {Label::literal(v), {}, -1}; }
  static Term symbol(SymbolId id, std::vector<Term> args = {}) {
    return {Label::symbol(id), std::move(args), -1};
  }
  static Term head(Term t) { return {Label::head(), {std::move(t)}, -1}; }
  static Term norm(Term t) { return {Label::norm(), {std::move(t)}, -1}; }
  static Term special(SymbolId op, std::vector<Term> args) {
    return {Label::special(op), std::move(args), -1};
  }

  bool is_variable() const { return label.is_variable(); }

  friend bool operator==(const Term&, const Term&) = default;
};

const Term& subterm(const Term& t, const Path& p);
Term& subterm(Term& t, const Path& p);
Term replace_at(Term t, const Path& p, Term replacement);

/// Paths of variable leaves in pre-order (leftmost-outermost).
std::vector<Path> variable_paths(const Term& t);

/// Largest variable index (or binder) used, plus one.
std::uint32_t variable_bound(const Term& t);

/// Replaces every `Var(index)` / `LitVar(index)` by `replacement`.
Term substitute(const Term& t, std::uint32_t index, const Term& replacement);

/// Term equality up to a consistent renaming of variables.
bool is_variant(const Term& a, const Term& b);

/// Syntactic unification of two linear patterns with disjoint variables.
/// Variables of `a` and `b` live in separate namespaces. A `LitVar` unifies
/// only with literals and other literal variables.
bool unifiable(const Term& a, const Term& b);

/// True iff `pattern` is more general than or equal to `instance`
/// (one-way matching, variables of `pattern` only).
bool generalizes(const Term& pattern, const Term& instance);

std::size_t term_size(const Term& t);

}  // namespace needle
