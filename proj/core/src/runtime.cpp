#include "needle/runtime.hpp"

#include <algorithm>

#include "needle/error.hpp"
#include "needle/printer.hpp"

namespace needle {

const char* outcome_name(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::Value: return "value";
    case OutcomeKind::Aborted: return "aborted";
    case OutcomeKind::StepLimit: return "step-limit";
  }
  return "?";
}

std::vector<const ExprGraph*> Trace::states() const {
  std::vector<const ExprGraph*> out;
  for (const auto& s : steps) out.push_back(&s.state);
  out.push_back(&final_state);
  return out;
}

RuleIndex::RuleIndex(const ObjectProgram& p, const Signature& sig) : symbols_(sig.symbol_count()) {
  table_.resize(3 * (symbols_ + 1));
  for (std::uint32_t i = 0; i < p.rules.size(); ++i) {
    const Term& lhs = p.rules[i].lhs;
    if (lhs.label.kind == LabelKind::Special) {
      table_[slot(lhs.label, {})].push_back(i);
      continue;
    }
    const Label& first = lhs.args.at(0).label;
    if (first.kind == LabelKind::Var) {
      for (std::size_t s = 0; s <= symbols_; ++s)
        table_[slot(lhs.label, s == symbols_ ? Label::literal(0) : Label::symbol(static_cast<SymbolId>(s)))].push_back(i);
    } else {
      table_[slot(lhs.label, first)].push_back(i);
    }
  }
}

std::size_t RuleIndex::slot(Label head, Label first) const {
  std::size_t base;
  switch (head.kind) {
    case LabelKind::Head: base = 0; break;
    case LabelKind::Norm: base = 1; break;
    case LabelKind::Special: return 2 * (symbols_ + 1) + head.symbol_id();
    default: throw InternalError("rule head is not H, N or f^H");
  }
  std::size_t idx = first.kind == LabelKind::Symbol ? first.symbol_id() : symbols_;
  return base * (symbols_ + 1) + idx;
}

const std::vector<std::uint32_t>& RuleIndex::candidates(Label head, Label first) const {
  if (head.kind == LabelKind::Head || head.kind == LabelKind::Norm) {
    if (first.kind != LabelKind::Symbol && first.kind != LabelKind::Literal) return empty_;
  }
  return table_[slot(head, first)];
}

std::int64_t builtin_apply(Builtin b, std::int64_t x, std::int64_t y) {
  std::int64_t r = 0;
  bool overflow = b == Builtin::Add ? __builtin_add_overflow(x, y, &r) : __builtin_sub_overflow(x, y, &r);
  if (overflow)
    throw EvaluationError("integer overflow in " + std::string(b == Builtin::Add ? "add(" : "sub(") +
                          std::to_string(x) + "," + std::to_string(y) + ")");
  return r;
}

namespace {

// One match attempt at one redex: labels read are counted once per node
// across all candidate rules.
template <class Graph>
class Matcher {
 public:
  explicit Matcher(Graph& g) : g_(g) {}

  void reset() {
    seen_.clear();
    reads_ = 0;
  }
  std::uint64_t reads() const { return reads_; }

  Label read(NodeIndex n) {
    if (std::find(seen_.begin(), seen_.end(), n) == seen_.end()) {
      seen_.push_back(n);
      ++reads_;
    }
    return g_.label(n);
  }

  // Root label is known from the bucket; only arguments are inspected.
  bool match(const Term& lhs, NodeIndex at, std::vector<NodeIndex>& binds) {
    binds.assign(binds.size(), Heap::kNone);
    if (lhs.binder >= 0) binds.at(static_cast<std::size_t>(lhs.binder)) = at;
    for (std::size_t i = 0; i < lhs.args.size(); ++i)
      if (!match_arg(lhs.args[i], g_.child(at, i), binds)) return false;
    return true;
  }

 private:
  bool match_arg(const Term& p, NodeIndex n, std::vector<NodeIndex>& binds) {
    switch (p.label.kind) {
      case LabelKind::Var: binds[p.label.var_index()] = n; return true;
      case LabelKind::LitVar:
        if (read(n).kind != LabelKind::Literal) return false;
        binds[p.label.var_index()] = n;
        return true;
      default: break;
    }
    if (read(n) != p.label) return false;
    if (p.binder >= 0) binds[static_cast<std::size_t>(p.binder)] = n;
    for (std::size_t i = 0; i < p.args.size(); ++i)
      if (!match_arg(p.args[i], g_.child(n, i), binds)) return false;
    return true;
  }

  Graph& g_;
  std::vector<NodeIndex> seen_;
  std::uint64_t reads_ = 0;
};

struct GraphView {
  const ExprGraph& g;
  Label label(NodeIndex n) const { return g.node(n).label; }
  NodeIndex child(NodeIndex n, std::size_t i) const { return g.node(n).children.at(i); }
};

class Evaluator {
 public:
  Evaluator(const ObjectProgram& p, const System& sys, const EvalOptions& opts)
      : p_(p), sig_(sys.sig), index_(p, sys.sig), opts_(opts), matcher_(heap_) {}

  EvalResult run(const ExprGraph& e) {
    EvalResult res;
    NodeIndex input = heap_.load(e);
    root_ = heap_.alloc(Label::norm(), {input});
    if (opts_.trace) res.trace.emplace();
    gc_threshold_ = kMinHeap;
    stack_.push_back({root_, 0});
    while (!stack_.empty()) {
      Frame& f = stack_.back();
      NodeIndex n = heap_.resolve(f.node);
      f.node = n;
      if (f.next < heap_.arity(n)) {
        NodeIndex c = heap_.child(n, f.next++);
        if (!heap_.finished(c)) stack_.push_back({c, 0});
        continue;
      }
      if (!Label{heap_.kind(n), 0}.is_control()) {
        heap_.set_finished(n);
        stack_.pop_back();
        continue;
      }
      std::optional<TraceStep> step;
      if (opts_.trace) step = TraceStep{heap_.snapshot(root_), 0, n, 0};
      auto r = rewrite(n);
      if (r.kind == Step::Abort) {
        res.outcome = {OutcomeKind::Aborted, erase(heap_.snapshot(n))};
        break;
      }
      if (r.kind == Step::Limit) {
        res.outcome = {OutcomeKind::StepLimit, heap_.snapshot(root_)};
        break;
      }
      if (step) {
        step->rule = r.rule;
        step->contractum = r.contractum;
        res.trace->steps.push_back(std::move(*step));
      }
      heap_.redirect(n, r.contractum);
      stack_.back() = {r.contractum, 0};
      if (!opts_.trace && opts_.collect_garbage && heap_.size() > gc_threshold_) collect();
    }
    if (stack_.empty()) {
      res.outcome = {OutcomeKind::Value, heap_.snapshot(root_)};
      if (!is_constructor_form(res.outcome.graph, sig_))
        throw InternalError("evaluation ended in a state that is not a constructor form");
    }
    if (res.trace) res.trace->final_state = heap_.snapshot(root_);
    res.counters = counters_;
    return res;
  }

 private:
  struct Frame {
    NodeIndex node;
    std::uint32_t next;
  };
  enum class Step { Done, Abort, Limit };
  struct StepResult {
    Step kind = Step::Done;
    std::size_t rule = 0;
    NodeIndex contractum = 0;
  };

  static constexpr std::size_t kMinHeap = 1u << 22;

  void collect() {
    std::vector<NodeIndex*> roots{&root_};
    for (auto& f : stack_) roots.push_back(&f.node);
    heap_.collect(roots);
    gc_threshold_ = std::max(kMinHeap, 3 * heap_.size());
  }

  StepResult rewrite(NodeIndex n) {
    Label head = heap_.label(n);
    Label first{};
    matcher_.reset();
    if (index_.reads_first(head)) first = matcher_.read(heap_.child(n, 0));
    const auto& cands = index_.candidates(head, first);
    for (auto ri : cands) {
      const ObjectRule& r = p_.rules[ri];
      binds_.resize(r.var_names.size());
      if (!matcher_.match(r.lhs, n, binds_)) continue;
      counters_.node_matches += matcher_.reads();
      return apply(r, ri);
    }
    counters_.node_matches += matcher_.reads();
    throw InternalError("no rule matches redex " + print_graph(heap_.snapshot(n), sig_));
  }

  StepResult apply(const ObjectRule& r, std::size_t ri) {
    StepResult out;
    out.rule = ri;
    if (r.aborts) {
      out.kind = Step::Abort;
      return out;
    }
    bool proper = r.is_proper();
    if (proper && counters_.r_steps() >= opts_.max_steps) {
      out.kind = Step::Limit;
      return out;
    }
    counting_data_ = r.origin != Origin::Dispatch && r.origin != Origin::NormOp;
    if (r.native) {
      std::int64_t v = builtin_apply(*r.native, heap_.value(binds_[0]), heap_.value(binds_[1]));
      out.contractum = fresh(Label::literal(v), nullptr, 0);
    } else {
      out.contractum = build(r.rhs);
    }
    switch (r.origin) {
      case Origin::Dispatch: ++counters_.dispatch_steps; break;
      case Origin::NormCtor:
      case Origin::NormOp: ++counters_.norm_steps; break;
      default:
        if (heap_.kind(out.contractum) == LabelKind::Special) ++counters_.shortcut_steps;
        else ++counters_.rewrite_steps;
    }
    return out;
  }

  NodeIndex fresh(Label l, const NodeIndex* kids, std::size_t arity) {
    ++counters_.node_allocations;
    if (counting_data_ && (l.kind == LabelKind::Symbol || l.kind == LabelKind::Literal)) ++counters_.data_allocations;
    return heap_.alloc(l, kids, arity);
  }

  NodeIndex build(const Term& t) {
    if (t.label.kind == LabelKind::Var) return binds_.at(t.label.var_index());
    NodeIndex kids[8];
    std::vector<NodeIndex> many;
    NodeIndex* dst = kids;
    if (t.args.size() > 8) {
      many.resize(t.args.size());
      dst = many.data();
    }
    for (std::size_t i = 0; i < t.args.size(); ++i) dst[i] = build(t.args[i]);
    return fresh(t.label, dst, t.args.size());
  }

  const ObjectProgram& p_;
  const Signature& sig_;
  RuleIndex index_;
  EvalOptions opts_;
  Heap heap_;
  Matcher<Heap> matcher_;
  Counters counters_;
  std::vector<Frame> stack_;
  std::vector<NodeIndex> binds_;
  NodeIndex root_ = 0;
  std::size_t gc_threshold_ = 0;
  bool counting_data_ = false;
};

}  // namespace

std::optional<std::vector<NodeIndex>> match_rule(const ObjectRule& r, const ExprGraph& g, NodeIndex at,
                                                 std::uint64_t* matches) {
  GraphView view{g};
  Matcher<GraphView> m(view);
  if (g.node(at).label.kind != r.lhs.label.kind || g.node(at).label.value != r.lhs.label.value) {
    if (matches) *matches = 0;
    return std::nullopt;
  }
  std::vector<NodeIndex> binds(r.var_names.size(), Heap::kNone);
  bool ok = m.match(r.lhs, at, binds);
  if (matches) *matches = m.reads();
  if (!ok) return std::nullopt;
  return binds;
}

EvalResult eval(const ObjectProgram& p, const System& sys, const ExprGraph& e, const EvalOptions& opts) {
  check_well_formed(e, sys.sig);
  return Evaluator(p, sys, opts).run(e);
}

std::string format_trace(const Trace& t, const ObjectProgram& p, const Signature& sig) {
  std::string out;
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const auto& s = t.steps[i];
    out += "step " + std::to_string(i + 1) + ": " + origin_name(p.rules.at(s.rule).origin) + " @node" +
           std::to_string(s.redex) + ": " + print_graph(s.state, sig) + "\n";
  }
  out += "final: " + print_graph(t.final_state, sig) + "\n";
  return out;
}

}  // namespace needle
