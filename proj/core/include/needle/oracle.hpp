#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "needle/codegen.hpp"
#include "needle/graph.hpp"
#include "needle/runtime.hpp"
#include "needle/system.hpp"

namespace needle {

struct NeededRedex {
  enum class Kind { Redex, Exempt, None };
  Kind kind = Kind::None;
  NodeIndex node = 0;
  /// Source rule index within the node's operation; for builtins unused.
  std::size_t rule = 0;
  bool builtin = false;
};

/// Leftmost-outermost operation-rooted subexpression, then tree descent.
NeededRedex find_needed_redex(const System& sys, const ExprGraph& e);

/// Nodes visited by the descent from `start` (inclusive), ending at the redex
/// or exempt node.
std::vector<NodeIndex> descent_path(const System& sys, const ExprGraph& e, NodeIndex start);

/// One source-rule (or builtin) step at `node`. The result keeps ids of
/// surviving nodes; fresh nodes get ids from `next_id` onwards.
ExprGraph rewrite_at(const System& sys, const ExprGraph& e, NodeIndex node, std::size_t rule, bool builtin,
                     std::uint64_t next_id);

struct OracleResult {
  Outcome outcome;
  std::uint64_t steps = 0;
  std::uint64_t allocations = 0;
  std::vector<ExprGraph> states;  // filled when tracing: every state, first to last
};

/// Needed-strategy evaluation directly on the source system. `max_steps`
/// bounds the number of rule applications.
OracleResult oracle_eval(const System& sys, const ExprGraph& e, std::uint64_t max_steps = kDefaultMaxSteps,
                         bool trace = false);

struct ValidationReport {
  std::vector<std::string> violations;
  std::uint64_t proper_steps = 0;
  std::uint64_t oracle_steps = 0;
  bool passed() const { return violations.empty(); }
  /// One line per violation followed by `PASS ...` or `FAIL ...`.
  std::string render() const;
};

/// Checks a C_R trace: erasure, neededness witness, operation-rooted dispatch,
/// head-constructor results, innermost discipline, and step optimality.
ValidationReport validate_c_r_trace(const System& sys, const ObjectProgram& cr, const Trace& tr,
                                    std::uint64_t max_steps = kDefaultMaxSteps);

}  // namespace needle
