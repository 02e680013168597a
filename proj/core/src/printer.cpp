#include "needle/printer.hpp"

#include <unordered_map>

namespace needle {

std::string label_name(const Label& l, const Signature& sig) {
  switch (l.kind) {
    case LabelKind::Symbol: return sig.symbol(l.symbol_id()).name;
    case LabelKind::Literal: return std::to_string(l.value);
    case LabelKind::Head: return "H";
    case LabelKind::Norm: return "N";
    case LabelKind::Special: return sig.symbol(l.symbol_id()).name + "^H";
    case LabelKind::Var: return "_" + std::to_string(l.value);
    case LabelKind::LitVar: return "#_" + std::to_string(l.value);
  }
  return "?";
}

namespace {

std::string var_name(std::uint32_t index, const std::vector<std::string>& names) {
  if (index < names.size() && !names[index].empty()) return names[index];
  return "_" + std::to_string(index);
}

void print_into(const Term& t, const Signature& sig, const std::vector<std::string>& names,
                const std::unordered_map<std::uint32_t, const Term*>* binders, std::string& out) {
  if (t.label.kind == LabelKind::Var) {
    if (binders) {
      auto it = binders->find(t.label.var_index());
      if (it != binders->end()) {
        print_into(*it->second, sig, names, nullptr, out);
        return;
      }
    }
    out += var_name(t.label.var_index(), names);
    return;
  }
  if (t.label.kind == LabelKind::LitVar) {
    out += '#';
    out += var_name(t.label.var_index(), names);
    return;
  }
  out += label_name(t.label, sig);
  bool parens = !t.args.empty() || t.label.kind == LabelKind::Special;
  if (t.label.is_symbol() && t.args.empty() && sig.symbol(t.label.symbol_id()).is_operation())
    parens = true;
  if (!parens) return;
  out += '(';
  for (std::size_t i = 0; i < t.args.size(); ++i) {
    if (i) out += ',';
    print_into(t.args[i], sig, names, binders, out);
  }
  out += ')';
}

void collect_binders(const Term& t, std::unordered_map<std::uint32_t, const Term*>& out) {
  if (t.binder >= 0) out.emplace(static_cast<std::uint32_t>(t.binder), &t);
  for (const auto& a : t.args) collect_binders(a, out);
}

}  // namespace

std::string print_term(const Term& t, const Signature& sig, const std::vector<std::string>& var_names) {
  std::string out;
  print_into(t, sig, var_names, nullptr, out);
  return out;
}

std::string print_rule(const Term& lhs, const Term& rhs, const Signature& sig,
                       const std::vector<std::string>& var_names) {
  std::unordered_map<std::uint32_t, const Term*> binders;
  collect_binders(lhs, binders);
  std::string out;
  print_into(lhs, sig, var_names, nullptr, out);
  out += " = ";
  print_into(rhs, sig, var_names, &binders, out);
  return out;
}

std::string print_graph(const ExprGraph& g, NodeIndex from, const Signature& sig) {
  std::string out;
  // Each frame: node, next child; ',' and ')' emitted on the way back up.
  std::vector<std::pair<NodeIndex, std::size_t>> stack{{from, 0}};
  while (!stack.empty()) {
    auto& [n, next] = stack.back();
    const auto& node = g.node(n);
    if (next == 0) {
      out += label_name(node.label, sig);
      bool parens = !node.children.empty() || node.label.kind == LabelKind::Special ||
                    (node.label.is_symbol() && sig.symbol(node.label.symbol_id()).is_operation());
      if (!parens) {
        stack.pop_back();
        continue;
      }
      out += '(';
    }
    if (next < node.children.size()) {
      if (next) out += ',';
      NodeIndex c = node.children[next++];
      stack.emplace_back(c, 0);
      continue;
    }
    out += ')';
    stack.pop_back();
  }
  return out;
}

std::string print_graph(const ExprGraph& g, const Signature& sig) { return print_graph(g, g.root(), sig); }

}  // namespace needle
