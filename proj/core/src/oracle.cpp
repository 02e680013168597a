#include "needle/oracle.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "needle/error.hpp"
#include "needle/printer.hpp"

namespace needle {

namespace {

struct Step {
  enum class Kind { Rule, Exempt, Descend, Builtin };
  Kind kind = Kind::Exempt;
  std::size_t rule = 0;
  NodeIndex node = 0;
};

bool is_op_label(const Label& l, const Signature& sig) {
  return l.is_symbol() && sig.symbol(l.symbol_id()).is_operation();
}

// One descent step at the operation-rooted node `at`.
template <class G>
Step descend(const System& sys, G& g, NodeIndex at) {
  const auto& sig = sys.sig;
  SymbolId op = g.label(at).symbol_id();
  if (sig.builtin_of(op)) {
    for (std::size_t i = 0; i < 2; ++i) {
      NodeIndex c = g.child(at, i);
      if (is_op_label(g.label(c), sig)) return {Step::Kind::Descend, 0, c};
      if (!g.label(c).is_literal()) throw InternalError("builtin argument is not an integer");
    }
    return {Step::Kind::Builtin, 0, at};
  }
  const DefTree* cur = &sys.operation(op).tree.root;
  for (;;) {
    switch (cur->kind) {
      case DefTree::Kind::Rule: return {Step::Kind::Rule, cur->rule, at};
      case DefTree::Kind::Exempt: return {Step::Kind::Exempt, 0, at};
      default: break;
    }
    NodeIndex n = at;
    for (auto i : cur->position) n = g.child(n, i);
    Label l = g.label(n);
    if (is_op_label(l, sig)) return {Step::Kind::Descend, 0, n};
    const DefTree* next = nullptr;
    if (cur->kind == DefTree::Kind::Branch) {
      for (const auto& c : cur->children)
        if (subterm(c.pattern, cur->position).label == l) next = &c;
    } else if (l.is_literal()) {
      next = &cur->children.back();
      for (std::size_t i = 0; i < cur->literals.size(); ++i)
        if (cur->literals[i] == l.value) next = &cur->children[i];
    }
    if (!next) throw InternalError("ill-typed expression at an inductive position");
    cur = next;
  }
}

template <class G>
bool bind(const Term& p, G& g, NodeIndex n, std::vector<NodeIndex>& binds) {
  if (p.is_variable()) {
    binds.at(p.label.var_index()) = n;
    return true;
  }
  if (g.label(n) != p.label) return false;
  for (std::size_t i = 0; i < p.args.size(); ++i)
    if (!bind(p.args[i], g, g.child(n, i), binds)) return false;
  return true;
}

struct GraphView {
  const ExprGraph& g;
  Label label(NodeIndex n) const { return g.node(n).label; }
  NodeIndex child(NodeIndex n, std::size_t i) const { return g.node(n).children.at(i); }
};

class Oracle {
 public:
  Oracle(const System& sys, std::uint64_t max_steps, bool trace)
      : sys_(sys), max_steps_(max_steps), trace_(trace) {}

  OracleResult run(const ExprGraph& e) {
    holder_ = heap_.alloc(Label::norm(), {heap_.load(e)});
    gc_threshold_ = kMinHeap;
    if (trace_) res_.states.push_back(state());
    outer_.push_back({holder_, 0});
    while (!outer_.empty()) {
      Frame& f = outer_.back();
      NodeIndex n = heap_.resolve(f.node);
      f.node = n;
      if (f.next < heap_.arity(n)) {
        NodeIndex c = heap_.child(n, f.next);
        if (heap_.finished(c)) {
          ++f.next;
        } else if (is_op_label(heap_.label(c), sys_.sig)) {
          if (!compute(c)) return finish();
        } else {
          ++f.next;
          outer_.push_back({c, 0});
        }
        continue;
      }
      heap_.set_finished(n);
      outer_.pop_back();
    }
    res_.outcome = {OutcomeKind::Value, heap_.snapshot(heap_.child(holder_, 0))};
    return finish();
  }

 private:
  struct Frame {
    NodeIndex node;
    std::uint32_t next;
  };
  static constexpr std::size_t kMinHeap = 1u << 22;

  OracleResult finish() { return std::move(res_); }
  ExprGraph state() const { return heap_.snapshot(heap_.child(holder_, 0)); }

  // Evaluates the operation-rooted node `c` to head-constructor form.
  bool compute(NodeIndex c) {
    chain_.assign(1, c);
    while (!chain_.empty()) {
      NodeIndex t = heap_.resolve(chain_.back());
      chain_.back() = t;
      if (!is_op_label(heap_.label(t), sys_.sig)) {
        chain_.pop_back();
        continue;
      }
      Step s = descend(sys_, heap_, t);
      if (s.kind == Step::Kind::Descend) {
        chain_.push_back(s.node);
        continue;
      }
      if (s.kind == Step::Kind::Exempt) {
        res_.outcome = {OutcomeKind::Aborted, heap_.snapshot(t)};
        return false;
      }
      if (res_.steps >= max_steps_) {
        res_.outcome = {OutcomeKind::StepLimit, state()};
        return false;
      }
      heap_.redirect(t, contract(t, s));
      ++res_.steps;
      if (trace_) res_.states.push_back(state());
      else if (heap_.size() > gc_threshold_) collect();
    }
    return true;
  }

  NodeIndex contract(NodeIndex t, const Step& s) {
    if (s.kind == Step::Kind::Builtin) {
      auto b = *sys_.sig.builtin_of(heap_.label(t).symbol_id());
      std::int64_t v = builtin_apply(b, heap_.value(heap_.child(t, 0)), heap_.value(heap_.child(t, 1)));
      ++res_.allocations;
      return heap_.alloc(Label::literal(v), {});
    }
    const SourceRule& r = sys_.operation(heap_.label(t).symbol_id()).rules.at(s.rule);
    binds_.assign(r.var_names.size(), Heap::kNone);
    if (!bind(r.lhs, heap_, t, binds_)) throw InternalError("descent chose a rule whose pattern does not match");
    return build(r.rhs);
  }

  NodeIndex build(const Term& t) {
    if (t.is_variable()) return binds_.at(t.label.var_index());
    std::vector<NodeIndex> kids;
    kids.reserve(t.args.size());
    for (const auto& a : t.args) kids.push_back(build(a));
    ++res_.allocations;
    return heap_.alloc(t.label, kids.data(), kids.size());
  }

  void collect() {
    std::vector<NodeIndex*> roots{&holder_};
    for (auto& f : outer_) roots.push_back(&f.node);
    for (auto& c : chain_) roots.push_back(&c);
    heap_.collect(roots);
    gc_threshold_ = std::max(kMinHeap, 3 * heap_.size());
  }

  const System& sys_;
  std::uint64_t max_steps_;
  bool trace_;
  Heap heap_;
  NodeIndex holder_ = 0;
  std::vector<Frame> outer_;
  std::vector<NodeIndex> chain_;
  std::vector<NodeIndex> binds_;
  std::size_t gc_threshold_ = 0;
  OracleResult res_;
};

// Operation-rooted nodes reachable from the root through constructors only.
std::vector<NodeIndex> outermost_operations(const System& sys, const ExprGraph& e) {
  std::vector<NodeIndex> out;
  std::vector<bool> seen(e.size(), false);
  std::vector<NodeIndex> stack{e.root()};
  while (!stack.empty()) {
    NodeIndex n = stack.back();
    stack.pop_back();
    if (seen[n]) continue;
    seen[n] = true;
    const auto& node = e.node(n);
    if (is_op_label(node.label, sys.sig)) {
      out.push_back(n);
      continue;
    }
    for (auto it = node.children.rbegin(); it != node.children.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

// Rebuilds the part of `nodes` reachable from `root`, keeping ids.
ExprGraph compact(const std::vector<GraphNode>& nodes, NodeIndex root) {
  ExprGraph g;
  std::vector<NodeIndex> placed(nodes.size(), Heap::kNone);
  std::vector<std::pair<NodeIndex, bool>> stack{{root, false}};
  std::vector<NodeIndex> kids;
  while (!stack.empty()) {
    auto [n, expanded] = stack.back();
    stack.pop_back();
    if (placed[n] != Heap::kNone) continue;
    if (!expanded) {
      stack.emplace_back(n, true);
      for (auto it = nodes[n].children.rbegin(); it != nodes[n].children.rend(); ++it)
        if (placed[*it] == Heap::kNone) stack.emplace_back(*it, false);
      continue;
    }
    kids.clear();
    for (auto c : nodes[n].children) kids.push_back(placed[c]);
    placed[n] = g.add(nodes[n].label, kids, nodes[n].id);
  }
  g.set_root(placed[root]);
  return g;
}

}  // namespace

NeededRedex find_needed_redex(const System& sys, const ExprGraph& e) {
  auto outer = outermost_operations(sys, e);
  if (outer.empty()) return {};
  auto path = descent_path(sys, e, outer.front());
  GraphView view{e};
  Step s = descend(sys, view, path.back());
  NeededRedex out;
  out.node = path.back();
  if (s.kind == Step::Kind::Exempt) {
    out.kind = NeededRedex::Kind::Exempt;
  } else {
    out.kind = NeededRedex::Kind::Redex;
    out.rule = s.rule;
    out.builtin = s.kind == Step::Kind::Builtin;
  }
  return out;
}

std::vector<NodeIndex> descent_path(const System& sys, const ExprGraph& e, NodeIndex start) {
  GraphView view{e};
  std::vector<NodeIndex> path{start};
  for (;;) {
    Step s = descend(sys, view, path.back());
    if (s.kind != Step::Kind::Descend) return path;
    path.push_back(s.node);
  }
}

ExprGraph rewrite_at(const System& sys, const ExprGraph& e, NodeIndex node, std::size_t rule, bool builtin,
                     std::uint64_t next_id) {
  std::vector<GraphNode> nodes = e.nodes();
  GraphView view{e};
  auto fresh = [&](Label l, std::vector<NodeIndex> kids) {
    nodes.push_back({l, std::move(kids), next_id++});
    return static_cast<NodeIndex>(nodes.size() - 1);
  };
  NodeIndex contractum;
  SymbolId op = e.node(node).label.symbol_id();
  if (builtin) {
    auto b = sys.sig.builtin_of(op);
    if (!b) throw InternalError("rewrite_at: not a builtin");
    contractum = fresh(Label::literal(builtin_apply(*b, e.node(e.node(node).children.at(0)).label.value,
                                                   e.node(e.node(node).children.at(1)).label.value)),
                       {});
  } else {
    const SourceRule& r = sys.operation(op).rules.at(rule);
    std::vector<NodeIndex> binds(r.var_names.size(), Heap::kNone);
    if (!bind(r.lhs, view, node, binds)) throw ValidationError("rewrite_at: rule does not match");
    auto build = [&](auto& self, const Term& t) -> NodeIndex {
      if (t.is_variable()) return binds.at(t.label.var_index());
      std::vector<NodeIndex> kids;
      for (const auto& a : t.args) kids.push_back(self(self, a));
      return fresh(t.label, std::move(kids));
    };
    contractum = build(build, r.rhs);
  }
  for (auto& n : nodes)
    for (auto& c : n.children)
      if (c == node) c = contractum;
  return compact(nodes, e.root() == node ? contractum : e.root());
}

OracleResult oracle_eval(const System& sys, const ExprGraph& e, std::uint64_t max_steps, bool trace) {
  check_well_formed(e, sys.sig);
  return Oracle(sys, max_steps, trace).run(e);
}

std::string ValidationReport::render() const {
  std::string out;
  for (const auto& v : violations) out += "violation: " + v + "\n";
  if (passed())
    out += "PASS proper-steps=" + std::to_string(proper_steps) + " oracle-steps=" + std::to_string(oracle_steps) + "\n";
  else
    out += "FAIL violations=" + std::to_string(violations.size()) + "\n";
  return out;
}

ValidationReport validate_c_r_trace(const System& sys, const ObjectProgram& cr, const Trace& tr,
                                    std::uint64_t max_steps) {
  const auto& sig = sys.sig;
  ValidationReport rep;
  auto states = tr.states();
  auto fail = [&](std::size_t i, const std::string& msg) {
    rep.violations.push_back("step " + std::to_string(i + 1) + ": " + msg);
  };
  auto is_ctor_label = [&](const Label& l) {
    return l.is_literal() || (l.is_symbol() && sig.symbol(l.symbol_id()).is_constructor());
  };

  for (std::size_t i = 0; i < tr.steps.size(); ++i) {
    const TraceStep& st = tr.steps[i];
    const ExprGraph& before = *states[i];
    const ExprGraph& after = *states[i + 1];
    if (st.rule >= cr.rules.size()) {
      fail(i, "rule index out of range");
      continue;
    }
    const ObjectRule& r = cr.rules[st.rule];
    auto redex = before.find_id(st.redex);
    if (redex < 0) {
      fail(i, "redex node" + std::to_string(st.redex) + " not in state");
      continue;
    }
    auto rx = static_cast<NodeIndex>(redex);
    if (before.node(rx).label.kind != r.lhs.label.kind) {
      fail(i, "redex label does not match the rule head");
      continue;
    }

    // Innermost discipline.
    {
      std::vector<NodeIndex> stack(before.node(rx).children.begin(), before.node(rx).children.end());
      std::unordered_set<NodeIndex> seen;
      while (!stack.empty()) {
        NodeIndex n = stack.back();
        stack.pop_back();
        if (!seen.insert(n).second) continue;
        if (before.node(n).label.is_control()) {
          fail(i, "redex has a control-labeled descendant (not innermost)");
          break;
        }
        for (auto c : before.node(n).children) stack.push_back(c);
      }
    }

    ExprGraph e_before = erase(before);
    ExprGraph e_after = erase(after);
    if (!r.is_proper()) {
      if (!graphs_equal_mod_renaming(e_before, e_after)) fail(i, std::string(origin_name(r.origin)) + " step changed the erased state");
      if (r.origin == Origin::Dispatch) {
        auto k = after.find_id(st.contractum);
        bool ok = false;
        if (k >= 0 && after.node(static_cast<NodeIndex>(k)).label.kind == LabelKind::Head) {
          // Fresh nodes of the contractum; nested branches put H below a
          // constructor.
          NodeIndex app = after.node(static_cast<NodeIndex>(k)).children.at(0);
          bool any = false;
          ok = true;
          std::vector<NodeIndex> todo{app};
          std::unordered_set<NodeIndex> visited;
          while (!todo.empty()) {
            NodeIndex n = todo.back();
            todo.pop_back();
            if (!visited.insert(n).second) continue;
            if (after.node(n).label.kind == LabelKind::Head) {
              any = true;
              ok &= is_op_label(after.node(after.node(n).children.at(0)).label, sig);
              continue;
            }
            for (auto c : after.node(n).children)
              if (before.find_id(after.node(c).id) < 0) todo.push_back(c);
          }
          ok &= any;
        }
        if (!ok) fail(i, "dispatch contractum does not apply H to an operation-rooted argument");
      }
      continue;
    }

    ++rep.proper_steps;
    if (before.node(rx).label.kind != LabelKind::Head) {
      fail(i, "proper step at a node not labeled H");
      continue;
    }
    std::uint64_t w_id = before.node(before.node(rx).children.at(0)).id;
    auto w = e_before.find_id(w_id);
    if (w < 0) {
      fail(i, "H argument missing from the erased state");
      continue;
    }
    auto wi = static_cast<NodeIndex>(w);
    std::uint64_t next_id = 0;
    for (const auto& n : e_before.nodes()) next_id = std::max(next_id, n.id + 1);
    for (const auto& n : after.nodes()) next_id = std::max(next_id, n.id + 1);
    try {
      ExprGraph expect = rewrite_at(sys, e_before, wi, r.source_rule, r.native.has_value(), next_id);
      if (!graphs_equal_mod_renaming(expect, e_after))
        fail(i, "erased states are not one " + std::string(r.native ? "builtin" : "rule") + " step apart");
    } catch (const Error& ex) {
      fail(i, std::string("source rule does not apply: ") + ex.what());
    }

    bool needed = false;
    for (NodeIndex o : outermost_operations(sys, e_before)) {
      auto path = descent_path(sys, e_before, o);
      if (path.back() == wi) {
        needed = true;
        break;
      }
    }
    if (!needed) fail(i, "reduced node is not on a needed descent path");

    auto k = after.find_id(st.contractum);
    if (k < 0) {
      fail(i, "contractum missing from the next state");
    } else {
      const Label& l = after.node(static_cast<NodeIndex>(k)).label;
      if (l.kind != LabelKind::Head && !is_ctor_label(l))
        fail(i, "H computation ended in " + label_name(l, sig) + ", not a head-constructor form");
    }
  }

  if (!states.empty()) {
    auto o = oracle_eval(sys, erase(*states.front()), max_steps);
    rep.oracle_steps = o.steps;
    if (is_constructor_form(tr.final_state, sig) && o.steps != rep.proper_steps)
      rep.violations.push_back("proper steps " + std::to_string(rep.proper_steps) + " differ from oracle steps " +
                               std::to_string(o.steps));
  }
  return rep;
}

}  // namespace needle
