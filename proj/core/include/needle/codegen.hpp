#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "needle/signature.hpp"
#include "needle/system.hpp"
#include "needle/term.hpp"

namespace needle {

enum class Mode { CR, TR, OR };

/// Which compilation case produced a rule.
enum class Origin {
  Dispatch,          // branch: push H into the inductive argument
  OpRooted,          // rhs rooted by an operation
  CtorRooted,        // rhs rooted by a constructor or literal
  CollapseInstance,  // rhs a variable, one rule per constructor
  CollapseDefault,   // rhs a variable, H passed on
  Exempt,
  NormCtor,
  NormOp,
  Builtin,           // native leaf of add/sub
};

const char* origin_name(Origin o);
const char* mode_name(Mode m);

struct ObjectRule {
  Term lhs;
  Term rhs;                         // unused when `aborts` or `native`
  bool aborts = false;
  std::optional<Builtin> native;    // builtin leaf: rhs computed from the two literal arguments
  Origin origin = Origin::Dispatch;
  std::vector<std::string> var_names;
  std::vector<TypeId> var_types;
  SymbolId source_op = 0;           // operation whose tree produced the rule (N rules: 0)
  std::size_t source_rule = 0;      // index of the source rule (rule-node origins only)
  std::size_t priority = 0;

  /// H, N or f^H.
  Label head() const { return lhs.label; }
  /// Rewrites the graph rooted by the redex argument by one source rule.
  bool is_proper() const;
};

/// Ordered object rules. Priority is the index in `rules`.
struct ObjectProgram {
  Mode mode = Mode::CR;
  std::vector<ObjectRule> rules;
  std::vector<SymbolId> specialized;  // f with f^H used (T_R, O_R)

  std::size_t count(LabelKind head) const;
};

/// H rules of one operation, post-order over its definitional tree.
std::vector<ObjectRule> compile_operation(const System& sys, const Operation& op);

/// H rules of an active builtin: native leaf, then the two dispatch rules.
std::vector<ObjectRule> compile_builtin(const Signature& sig, Builtin b);

/// N rules: constructors in declaration order, literals, then operations.
std::vector<ObjectRule> gen_norm_rules(const System& sys);

/// Instantiates every variable that occurs as the argument of H.
ObjectProgram phase1(const ObjectProgram& p, const System& sys);

/// Fuses H∘f into f^H in every rule side.
ObjectProgram phase2(const ObjectProgram& p, const System& sys);

/// Wraps H around operation-rooted arguments at demanded positions of
/// operation-rooted right-hand sides.
ObjectProgram wrap_needed(const ObjectProgram& p, const System& sys);

/// Applies tau to a rule side. Throws ValidationError on H over a variable
/// or a constructor.
Term tau_term(const Term& t, const Signature& sig);

/// Demanded argument positions of an operation (both positions for builtins).
std::vector<std::uint32_t> demanded_args(const System& sys, SymbolId op);

ObjectProgram build_program(const System& sys, Mode mode);

/// One rule per line, priority order, origin tag as a trailing comment.
std::string render_rule(const ObjectRule& r, const Signature& sig);
std::string render_program(const ObjectProgram& p, const Signature& sig);

}  // namespace needle
