#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "needle/codegen.hpp"
#include "needle/graph.hpp"
#include "needle/heap.hpp"
#include "needle/system.hpp"

namespace needle {

struct Counters {
  std::uint64_t rewrite_steps = 0;
  std::uint64_t shortcut_steps = 0;
  std::uint64_t dispatch_steps = 0;
  std::uint64_t norm_steps = 0;
  std::uint64_t node_allocations = 0;
  std::uint64_t node_matches = 0;
  // Constructor and literal nodes built by rewrite and shortcut steps and by
  // N over constructors; the wrappers and copies made by dispatch and by
  // N over operations are left out.
  std::uint64_t data_allocations = 0;

  /// Applications of source rules (and builtin leaves).
  std::uint64_t r_steps() const { return rewrite_steps + shortcut_steps; }
};

enum class OutcomeKind { Value, Aborted, StepLimit };

const char* outcome_name(OutcomeKind k);

/// `graph` is the value, the offending (erased) subexpression, or the partial
/// state, respectively.
struct Outcome {
  OutcomeKind kind = OutcomeKind::Value;
  ExprGraph graph;
};

struct TraceStep {
  ExprGraph state;  // before the step
  std::size_t rule = 0;
  std::uint64_t redex = 0;
  std::uint64_t contractum = 0;
};

struct Trace {
  std::vector<TraceStep> steps;
  ExprGraph final_state;

  /// All states including the final one.
  std::vector<const ExprGraph*> states() const;
};

inline constexpr std::uint64_t kDefaultMaxSteps = 100'000'000;

struct EvalOptions {
  std::uint64_t max_steps = kDefaultMaxSteps;  // bound on r_steps()
  bool trace = false;
  bool collect_garbage = true;                 // ignored under trace
};

struct EvalResult {
  Outcome outcome;
  Counters counters;
  std::optional<Trace> trace;
};

/// Per-head-symbol rule lists of an object program, in priority order.
class RuleIndex {
 public:
  RuleIndex(const ObjectProgram& p, const Signature& sig);

  /// Rules that can match a redex labeled `head` whose first child is
  /// labeled `first` (ignored for f^H).
  const std::vector<std::uint32_t>& candidates(Label head, Label first) const;
  bool reads_first(Label head) const { return head.kind != LabelKind::Special; }

 private:
  std::size_t slot(Label head, Label first) const;

  std::size_t symbols_ = 0;
  std::vector<std::vector<std::uint32_t>> table_;
  std::vector<std::uint32_t> empty_;
};

/// Exact 64-bit add/sub. Throws EvaluationError on overflow.
std::int64_t builtin_apply(Builtin b, std::int64_t x, std::int64_t y);

/// Matches `r.lhs` at node `at`; returns one node per rule variable (unused
/// variables map to Heap::kNone). `matches` receives the number of distinct
/// nodes whose label was inspected, the redex root excluded.
std::optional<std::vector<NodeIndex>> match_rule(const ObjectRule& r, const ExprGraph& g, NodeIndex at,
                                                 std::uint64_t* matches = nullptr);

/// Innermost, leftmost evaluation of N(e).
EvalResult eval(const ObjectProgram& p, const System& sys, const ExprGraph& e, const EvalOptions& opts = {});

/// `step <n>: <origin> @node<id>: <state>` lines, then the final state.
std::string format_trace(const Trace& t, const ObjectProgram& p, const Signature& sig);

}  // namespace needle
