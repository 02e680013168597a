#include "needle/graph.hpp"

#include <unordered_map>

#include "needle/error.hpp"
#include "needle/signature.hpp"

namespace needle {

namespace {

constexpr NodeIndex kUnvisited = static_cast<NodeIndex>(-1);

NodeIndex build_from_term(ExprGraph& g, const Term& t) {
  if (t.is_variable()) throw ValidationError("graph_from_term: term is not ground");
  std::vector<NodeIndex> kids;
  kids.reserve(t.args.size());
  for (const auto& a : t.args) kids.push_back(build_from_term(g, a));
  return g.add(t.label, std::move(kids));
}

// Post-order DFS over reachable nodes; `visit(i)` runs after all children.
template <typename Visit>
void post_order(const ExprGraph& g, NodeIndex from, Visit&& visit) {
  std::vector<std::uint8_t> state(g.size(), 0);  // 0 new, 1 open, 2 done
  std::vector<std::pair<NodeIndex, std::size_t>> stack{{from, 0}};
  state[from] = 1;
  while (!stack.empty()) {
    auto& [n, next] = stack.back();
    const auto& kids = g.node(n).children;
    if (next < kids.size()) {
      NodeIndex c = kids[next++];
      if (state[c] == 1) throw ValidationError("graph contains a cycle");
      if (state[c] == 0) {
        state[c] = 1;
        stack.emplace_back(c, 0);
      }
      continue;
    }
    state[n] = 2;
    NodeIndex done = n;
    stack.pop_back();
    visit(done);
  }
}

}  // namespace

NodeIndex ExprGraph::add(Label label, std::vector<NodeIndex> children, std::uint64_t id) {
  auto idx = static_cast<NodeIndex>(nodes_.size());
  nodes_.push_back({label, std::move(children), id});
  return idx;
}

NodeIndex ExprGraph::add(Label label, std::vector<NodeIndex> children) {
  return add(label, std::move(children), nodes_.size());
}

std::int64_t ExprGraph::find_id(std::uint64_t id) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].id == id) return static_cast<std::int64_t>(i);
  return -1;
}

ExprGraph graph_from_term(const Term& t) {
  ExprGraph g;
  g.set_root(build_from_term(g, t));
  return g;
}

Term graph_to_term(const ExprGraph& g, NodeIndex from) {
  const auto& n = g.node(from);
  Term t{n.label, {}, -1};
  t.args.reserve(n.children.size());
  for (auto c : n.children) t.args.push_back(graph_to_term(g, c));
  return t;
}

Term graph_to_term(const ExprGraph& g) { return graph_to_term(g, g.root()); }

ExprGraph subgraph(const ExprGraph& g, NodeIndex from) {
  ExprGraph out;
  std::vector<NodeIndex> map(g.size(), kUnvisited);
  post_order(g, from, [&](NodeIndex i) {
    const auto& n = g.node(i);
    std::vector<NodeIndex> kids;
    kids.reserve(n.children.size());
    for (auto c : n.children) kids.push_back(map[c]);
    map[i] = out.add(n.label, std::move(kids), n.id);
  });
  out.set_root(map[from]);
  return out;
}

void check_well_formed(const ExprGraph& g, const Signature& sig) {
  if (g.size() == 0) throw ValidationError("empty graph");
  std::size_t reached = 0;
  post_order(g, g.root(), [&](NodeIndex i) {
    ++reached;
    const auto& n = g.node(i);
    std::size_t arity = 0;
    switch (n.label.kind) {
      case LabelKind::Symbol:
      case LabelKind::Special:
        if (n.label.symbol_id() >= sig.symbol_count()) throw ValidationError("unknown symbol id");
        arity = sig.symbol(n.label.symbol_id()).arity();
        break;
      case LabelKind::Literal: arity = 0; break;
      case LabelKind::Head:
      case LabelKind::Norm: arity = 1; break;
      default: throw ValidationError("variable label in expression graph");
    }
    if (n.children.size() != arity) throw ValidationError("arity mismatch in expression graph");
  });
  if (reached != g.size()) throw ValidationError("graph has unreachable nodes");
}

ExprGraph erase(const ExprGraph& g) {
  ExprGraph out;
  std::vector<NodeIndex> map(g.size(), kUnvisited);
  post_order(g, g.root(), [&](NodeIndex i) {
    const auto& n = g.node(i);
    if (n.label.kind == LabelKind::Head || n.label.kind == LabelKind::Norm) {
      map[i] = map[n.children.at(0)];
      return;
    }
    Label l = n.label.kind == LabelKind::Special ? Label::symbol(n.label.symbol_id()) : n.label;
    std::vector<NodeIndex> kids;
    kids.reserve(n.children.size());
    for (auto c : n.children) kids.push_back(map[c]);
    map[i] = out.add(l, std::move(kids), n.id);
  });
  out.set_root(map[g.root()]);
  return out;
}

ExprGraph tau(const ExprGraph& g, const Signature& sig) {
  ExprGraph out;
  std::vector<NodeIndex> map(g.size(), kUnvisited);
  post_order(g, g.root(), [&](NodeIndex i) {
    const auto& n = g.node(i);
    if (n.label.kind == LabelKind::Head) {
      const auto& inner = g.node(n.children.at(0));
      if (!inner.label.is_symbol() || !sig.symbol(inner.label.symbol_id()).is_operation())
        throw ValidationError("tau: H applied to a non-operation-rooted expression");
      std::vector<NodeIndex> kids;
      for (auto c : inner.children) kids.push_back(map[c]);
      map[i] = out.add(Label::special(inner.label.symbol_id()), std::move(kids), n.id);
      return;
    }
    std::vector<NodeIndex> kids;
    for (auto c : n.children) kids.push_back(map[c]);
    map[i] = out.add(n.label, std::move(kids), n.id);
  });
  out.set_root(map[g.root()]);
  return out;
}

bool graphs_equal_mod_renaming(const ExprGraph& a, const ExprGraph& b) {
  if (a.size() == 0 || b.size() == 0) return a.size() == b.size();
  std::vector<NodeIndex> ab(a.size(), kUnvisited), ba(b.size(), kUnvisited);
  std::vector<std::pair<NodeIndex, NodeIndex>> work{{a.root(), b.root()}};
  while (!work.empty()) {
    auto [x, y] = work.back();
    work.pop_back();
    if (ab[x] != kUnvisited || ba[y] != kUnvisited) {
      if (ab[x] != y || ba[y] != x) return false;
      continue;
    }
    const auto& nx = a.node(x);
    const auto& ny = b.node(y);
    if (nx.label != ny.label || nx.children.size() != ny.children.size()) return false;
    ab[x] = y;
    ba[y] = x;
    for (std::size_t i = 0; i < nx.children.size(); ++i)
      work.emplace_back(nx.children[i], ny.children[i]);
  }
  return true;
}

bool is_constructor_form(const ExprGraph& g, const Signature& sig) {
  bool ok = true;
  post_order(g, g.root(), [&](NodeIndex i) {
    const auto& l = g.node(i).label;
    if (l.is_literal()) return;
    if (!l.is_symbol() || !sig.symbol(l.symbol_id()).is_constructor()) ok = false;
  });
  return ok;
}

}  // namespace needle
