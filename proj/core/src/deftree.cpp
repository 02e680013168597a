#include "needle/deftree.hpp"

#include <algorithm>
#include <set>

#include "needle/error.hpp"
#include "needle/printer.hpp"

namespace needle {

namespace {

// `pattern` (tree side) and `lhs` (rule side) are equal up to renaming, where
// a tree literal variable may stand for a rule variable.
bool same_shape(const Term& pattern, const Term& lhs) {
  if (pattern.is_variable()) return lhs.label.kind == LabelKind::Var;
  if (lhs.is_variable()) return false;
  if (pattern.label != lhs.label || pattern.args.size() != lhs.args.size()) return false;
  for (std::size_t i = 0; i < pattern.args.size(); ++i)
    if (!same_shape(pattern.args[i], lhs.args[i])) return false;
  return true;
}

// Copy of `lhs` whose variables become literal variables wherever `pattern`
// demands a literal.
Term guard_literals(const Term& pattern, const Term& lhs) {
  if (pattern.label.kind == LabelKind::LitVar && lhs.label.kind == LabelKind::Var)
    return Term::lit_var(lhs.label.var_index());
  Term out = lhs;
  for (std::size_t i = 0; i < out.args.size() && i < pattern.args.size(); ++i)
    out.args[i] = guard_literals(pattern.args[i], lhs.args[i]);
  return out;
}

class Builder {
 public:
  Builder(const Signature& sig, SymbolId op, const std::vector<SourceRule>& rules)
      : sig_(sig), op_(op), rules_(rules) {}

  DefTreeInfo run() {
    const auto& sym = sig_.symbol(op_);
    for (std::size_t i = 0; i < rules_.size(); ++i)
      for (std::size_t j = i + 1; j < rules_.size(); ++j)
        if (is_variant(rules_[i].lhs, rules_[j].lhs))
          throw ValidationError("DuplicateRule: rules " + std::to_string(i + 1) + " and " +
                                std::to_string(j + 1) + " of '" + sym.name +
                                "' have identical left-hand sides");
    std::vector<Term> args;
    for (auto t : sym.arg_types) args.push_back(fresh(t));
    std::vector<std::size_t> all(rules_.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    DefTreeInfo info;
    info.root = build(Term::symbol(op_, std::move(args)), all);
    info.var_types = std::move(var_types_);
    return info;
  }

 private:
  Term fresh(TypeId t) {
    var_types_.push_back(t);
    return Term::var(static_cast<std::uint32_t>(var_types_.size() - 1));
  }
  Term fresh_literal(TypeId t) {
    var_types_.push_back(t);
    return Term::lit_var(static_cast<std::uint32_t>(var_types_.size() - 1));
  }

  [[noreturn]] void not_sequential(const Term& pattern) const {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < var_types_.size(); ++i) names.push_back("x" + std::to_string(i + 1));
    std::string positions;
    for (const auto& p : variable_paths(pattern)) {
      if (!positions.empty()) positions += ", ";
      std::string s;
      for (auto i : p) s += (s.empty() ? "" : ".") + std::to_string(i + 1);
      positions += s;
    }
    throw ValidationError("NotInductivelySequential: operation '" + sig_.symbol(op_).name +
                          "' has no position demanded by all rules below pattern " +
                          print_term(pattern, sig_, names) + " (conflicting positions: " + positions + ")");
  }

  DefTree build(Term pattern, const std::vector<std::size_t>& subset) {
    if (subset.empty()) return {DefTree::Kind::Exempt, std::move(pattern), {}, {}, {}, 0};

    std::optional<std::size_t> exact;
    for (auto r : subset)
      if (same_shape(pattern, rules_[r].lhs)) exact = r;
    if (exact && subset.size() == 1)
      return {DefTree::Kind::Rule, guard_literals(pattern, rules_[*exact].lhs), {}, {}, {}, *exact};

    const auto paths = variable_paths(pattern);
    // Leftmost-outermost position where every rule has a constructor or literal.
    for (const auto& p : paths) {
      if (subterm(pattern, p).label.kind != LabelKind::Var) continue;
      bool demanded = std::all_of(subset.begin(), subset.end(), [&](std::size_t r) {
        return !subterm(rules_[r].lhs, p).is_variable();
      });
      if (!demanded) continue;
      if (sig_.type_at(pattern, p) == sig_.int_type()) return int_branch(pattern, p, subset);
      return branch(pattern, p, subset);
    }
    // Int extension: literal children plus a default for variable rules.
    for (const auto& p : paths) {
      if (subterm(pattern, p).label.kind != LabelKind::Var) continue;
      if (sig_.type_at(pattern, p) != sig_.int_type()) continue;
      bool any_literal = false, only_lit_or_var = true;
      for (auto r : subset) {
        const auto& s = subterm(rules_[r].lhs, p);
        any_literal |= s.label.is_literal();
        only_lit_or_var &= s.label.is_literal() || s.label.kind == LabelKind::Var;
      }
      if (any_literal && only_lit_or_var) return int_branch(pattern, p, subset);
    }
    not_sequential(pattern);
  }

  DefTree branch(const Term& pattern, const Path& p, const std::vector<std::size_t>& subset) {
    DefTree node{DefTree::Kind::Branch, pattern, p, {}, {}, 0};
    TypeId ty = sig_.type_at(pattern, p);
    for (SymbolId c : sig_.type(ty).constructors) {
      std::vector<Term> args;
      for (auto t : sig_.symbol(c).arg_types) args.push_back(fresh(t));
      Term child_pattern = replace_at(pattern, p, Term::symbol(c, std::move(args)));
      std::vector<std::size_t> child_rules;
      for (auto r : subset)
        if (subterm(rules_[r].lhs, p).label == Label::symbol(c)) child_rules.push_back(r);
      node.children.push_back(build(std::move(child_pattern), child_rules));
    }
    return node;
  }

  DefTree int_branch(const Term& pattern, const Path& p, const std::vector<std::size_t>& subset) {
    DefTree node{DefTree::Kind::IntBranch, pattern, p, {}, {}, 0};
    std::vector<std::size_t> defaults;
    for (auto r : subset) {
      const auto& s = subterm(rules_[r].lhs, p);
      if (s.is_variable()) {
        defaults.push_back(r);
      } else if (std::find(node.literals.begin(), node.literals.end(), s.label.value) ==
                 node.literals.end()) {
        node.literals.push_back(s.label.value);
      }
    }
    for (auto k : node.literals) {
      std::vector<std::size_t> child_rules;
      for (auto r : subset)
        if (subterm(rules_[r].lhs, p).label == Label::literal(k)) child_rules.push_back(r);
      node.children.push_back(build(replace_at(pattern, p, Term::literal(k)), child_rules));
    }
    node.children.push_back(build(replace_at(pattern, p, fresh_literal(sig_.int_type())), defaults));
    return node;
  }

  const Signature& sig_;
  SymbolId op_;
  const std::vector<SourceRule>& rules_;
  std::vector<TypeId> var_types_;
};

void collect_nodes(const DefTree& t, std::vector<const DefTree*>& out) {
  out.push_back(&t);
  for (const auto& c : t.children) collect_nodes(c, out);
}

std::set<std::uint32_t> demanded_rec(const DefTree& t) {
  if (!t.is_branch()) return {};
  std::set<std::uint32_t> common = demanded_rec(t.children.front());
  for (std::size_t i = 1; i < t.children.size(); ++i) {
    auto other = demanded_rec(t.children[i]);
    std::set<std::uint32_t> keep;
    std::set_intersection(common.begin(), common.end(), other.begin(), other.end(),
                          std::inserter(keep, keep.begin()));
    common = std::move(keep);
  }
  if (t.position.size() == 1) common.insert(t.position[0]);
  return common;
}

}  // namespace

DefTreeInfo build_deftree(const Signature& sig, SymbolId op, const std::vector<SourceRule>& rules) {
  if (!sig.symbol(op).is_operation() || sig.builtin_of(op))
    throw ValidationError("build_deftree: '" + sig.symbol(op).name + "' is not a user operation");
  for (const auto& r : rules)
    if (r.op != op || r.lhs.label != Label::symbol(op))
      throw ValidationError("build_deftree: rule does not belong to '" + sig.symbol(op).name + "'");
  return Builder(sig, op, rules).run();
}

Descent needed_descent(const DefTree& tree, const Signature& sig, const ExprGraph& g, NodeIndex at) {
  const DefTree* cur = &tree;
  for (;;) {
    switch (cur->kind) {
      case DefTree::Kind::Rule: return {Descent::Kind::Rule, cur->rule, 0};
      case DefTree::Kind::Exempt: return {Descent::Kind::Exempt, 0, 0};
      case DefTree::Kind::Branch:
      case DefTree::Kind::IntBranch: break;
    }
    NodeIndex n = at;
    for (auto i : cur->position) n = g.node(n).children.at(i);
    const Label& l = g.node(n).label;
    if (l.is_symbol() && sig.symbol(l.symbol_id()).is_operation()) return {Descent::Kind::Descend, 0, n};
    const DefTree* next = nullptr;
    if (cur->kind == DefTree::Kind::Branch && l.is_symbol()) {
      for (const auto& c : cur->children)
        if (subterm(c.pattern, cur->position).label == l) next = &c;
    } else if (cur->kind == DefTree::Kind::IntBranch && l.is_literal()) {
      next = &cur->children.back();
      for (std::size_t i = 0; i < cur->literals.size(); ++i)
        if (cur->literals[i] == l.value) next = &cur->children[i];
    }
    if (!next) throw InternalError("needed_descent: ill-typed expression at inductive position");
    cur = next;
  }
}

std::vector<std::uint32_t> demanded_positions(const DefTree& tree) {
  auto s = demanded_rec(tree);
  return {s.begin(), s.end()};
}

std::vector<const DefTree*> tree_nodes(const DefTree& tree) {
  std::vector<const DefTree*> out;
  collect_nodes(tree, out);
  return out;
}

std::vector<std::string> deftree_var_names(const DefTreeInfo& info) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < info.var_types.size(); ++i) names.push_back("x" + std::to_string(i + 1));
  return names;
}

namespace {

void render_rec(const DefTree& t, const Signature& sig, const std::vector<std::string>& tree_names,
                const std::vector<SourceRule>& rules, int depth, std::string& out) {
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
  switch (t.kind) {
    case DefTree::Kind::Branch:
    case DefTree::Kind::IntBranch: {
      out += t.kind == DefTree::Kind::Branch ? "branch " : "int-branch ";
      const auto& v = subterm(t.pattern, t.position);
      std::string shown = print_term(t.pattern, sig, tree_names);
      std::string var = print_term(v, sig, tree_names);
      std::string pos;
      for (auto i : t.position) pos += (pos.empty() ? "" : ".") + std::to_string(i + 1);
      out += shown + " @" + pos + " [" + var + "]\n";
      for (const auto& c : t.children) render_rec(c, sig, tree_names, rules, depth + 1, out);
      return;
    }
    case DefTree::Kind::Rule: {
      const auto& r = rules.at(t.rule);
      out += "rule " + print_rule(t.pattern, r.rhs, sig, r.var_names) + "\n";
      return;
    }
    case DefTree::Kind::Exempt:
      out += "exempt " + print_term(t.pattern, sig, tree_names) + "\n";
      return;
  }
}

}  // namespace

std::string render_deftree(const DefTree& tree, const Signature& sig,
                                      const std::vector<std::string>& var_names,
                                      const std::vector<SourceRule>& rules) {
  std::string out;
  render_rec(tree, sig, var_names, rules, 0, out);
  return out;
}

}  // namespace needle
