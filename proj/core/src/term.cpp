#include "needle/term.hpp"

#include <algorithm>
#include <unordered_map>

namespace needle {

const Term& subterm(const Term& t, const Path& p) {
  const Term* cur = &t;
  for (auto i : p) cur = &cur->args.at(i);
  return *cur;
}

Term& subterm(Term& t, const Path& p) {
  Term* cur = &t;
  for (auto i : p) cur = &cur->args.at(i);
  return *cur;
}

Term replace_at(Term t, const Path& p, Term replacement) {
  subterm(t, p) = std::move(replacement);
  return t;
}

namespace {

void collect_var_paths(const Term& t, Path& cur, std::vector<Path>& out) {
  if (t.is_variable()) {
    out.push_back(cur);
    return;
  }
  for (std::uint32_t i = 0; i < t.args.size(); ++i) {
    cur.push_back(i);
    collect_var_paths(t.args[i], cur, out);
    cur.pop_back();
  }
}

bool variant_rec(const Term& a, const Term& b, std::unordered_map<std::uint32_t, std::uint32_t>& ab,
                 std::unordered_map<std::uint32_t, std::uint32_t>& ba) {
  if (a.label.kind != b.label.kind) return false;
  if (a.is_variable()) {
    auto [ia, inserted_a] = ab.emplace(a.label.var_index(), b.label.var_index());
    auto [ib, inserted_b] = ba.emplace(b.label.var_index(), a.label.var_index());
    return ia->second == b.label.var_index() && ib->second == a.label.var_index();
  }
  if (a.label != b.label || a.args.size() != b.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!variant_rec(a.args[i], b.args[i], ab, ba)) return false;
  return true;
}

bool admits_literal_only(const Term& t) {
  return t.label.kind == LabelKind::LitVar || t.label.is_literal();
}

}  // namespace

std::vector<Path> variable_paths(const Term& t) {
  std::vector<Path> out;
  Path cur;
  collect_var_paths(t, cur, out);
  return out;
}

std::uint32_t variable_bound(const Term& t) {
  std::uint32_t bound = t.binder >= 0 ? static_cast<std::uint32_t>(t.binder) + 1 : 0;
  if (t.is_variable()) bound = std::max(bound, t.label.var_index() + 1);
  for (const auto& a : t.args) bound = std::max(bound, variable_bound(a));
  return bound;
}

Term substitute(const Term& t, std::uint32_t index, const Term& replacement) {
  if (t.is_variable()) return t.label.var_index() == index ? replacement : t;
  Term out{t.label, {}, t.binder};
  out.args.reserve(t.args.size());
  for (const auto& a : t.args) out.args.push_back(substitute(a, index, replacement));
  return out;
}

bool is_variant(const Term& a, const Term& b) {
  std::unordered_map<std::uint32_t, std::uint32_t> ab, ba;
  return variant_rec(a, b, ab, ba);
}

bool unifiable(const Term& a, const Term& b) {
  if (a.label.kind == LabelKind::Var || b.label.kind == LabelKind::Var) return true;
  if (a.label.kind == LabelKind::LitVar) return admits_literal_only(b);
  if (b.label.kind == LabelKind::LitVar) return admits_literal_only(a);
  if (a.label != b.label || a.args.size() != b.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!unifiable(a.args[i], b.args[i])) return false;
  return true;
}

bool generalizes(const Term& pattern, const Term& instance) {
  if (pattern.label.kind == LabelKind::Var) return true;
  if (pattern.label.kind == LabelKind::LitVar) return admits_literal_only(instance);
  if (pattern.label != instance.label || pattern.args.size() != instance.args.size()) return false;
  for (std::size_t i = 0; i < pattern.args.size(); ++i)
    if (!generalizes(pattern.args[i], instance.args[i])) return false;
  return true;
}

std::size_t term_size(const Term& t) {
  std::size_t n = 1;
  for (const auto& a : t.args) n += term_size(a);
  return n;
}

}  // namespace needle
