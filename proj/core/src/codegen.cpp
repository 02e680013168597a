#include "needle/codegen.hpp"

#include <algorithm>
#include <cctype>

#include "needle/error.hpp"
#include "needle/printer.hpp"

namespace needle {

const char* origin_name(Origin o) {
  switch (o) {
    case Origin::Dispatch: return "dispatch";
    case Origin::OpRooted: return "op-rooted";
    case Origin::CtorRooted: return "ctor-rooted";
    case Origin::CollapseInstance: return "collapse-instance";
    case Origin::CollapseDefault: return "collapse-default";
    case Origin::Exempt: return "exempt";
    case Origin::NormCtor: return "norm-ctor";
    case Origin::NormOp: return "norm-op";
    case Origin::Builtin: return "builtin";
  }
  return "?";
}

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::CR: return "cr";
    case Mode::TR: return "tr";
    case Mode::OR: return "or";
  }
  return "?";
}

bool ObjectRule::is_proper() const {
  switch (origin) {
    case Origin::OpRooted:
    case Origin::CtorRooted:
    case Origin::CollapseInstance:
    case Origin::CollapseDefault:
    case Origin::Builtin: return true;
    default: return false;
  }
}

std::size_t ObjectProgram::count(LabelKind head) const {
  return static_cast<std::size_t>(
      std::count_if(rules.begin(), rules.end(), [&](const ObjectRule& r) { return r.lhs.label.kind == head; }));
}

namespace {

bool is_op(const Term& t, const Signature& sig) {
  return t.label.is_symbol() && sig.symbol(t.label.symbol_id()).is_operation();
}

// Variable `index` becomes a literal variable (and loses nothing else).
Term to_lit_var(const Term& t, std::uint32_t index) {
  if (t.label == Label::var(index)) return Term::lit_var(index);
  Term out = t;
  for (auto& a : out.args) a = to_lit_var(a, index);
  return out;
}

// Replaces H(Var index) by Var index.
Term unwrap_var(const Term& t, std::uint32_t index) {
  if (t.label.kind == LabelKind::Head && t.args[0].label == Label::var(index)) return t.args[0];
  Term out = t;
  for (auto& a : out.args) a = unwrap_var(a, index);
  return out;
}

// First variable occurring directly under H, in pre-order.
std::optional<std::uint32_t> head_var(const Term& t) {
  if (t.label.kind == LabelKind::Head && t.args[0].label.kind == LabelKind::Var) return t.args[0].label.var_index();
  for (const auto& a : t.args)
    if (auto v = head_var(a)) return v;
  return std::nullopt;
}

std::string fresh_name(const std::string& base, std::size_t k, const std::vector<std::string>& taken) {
  std::string stem = base.empty() || base == "_" ? "v" : base;
  if (std::isdigit(static_cast<unsigned char>(stem.back()))) stem += '_';
  std::string name = stem + std::to_string(k);
  while (std::find(taken.begin(), taken.end(), name) != taken.end()) name += '\'';
  return name;
}

// Fresh variables for the arguments of `sym`, named after `base`.
Term fresh_application(ObjectRule& r, SymbolId id, const Signature& sig, const std::string& base) {
  const auto& s = sig.symbol(id);
  std::vector<Term> args;
  for (std::size_t k = 0; k < s.arity(); ++k) {
    auto index = static_cast<std::uint32_t>(r.var_names.size());
    r.var_names.push_back(fresh_name(base, k + 1, r.var_names));
    r.var_types.push_back(s.arg_types[k]);
    args.push_back(Term::var(index));
  }
  return Term::symbol(id, std::move(args));
}

class OperationCompiler {
 public:
  OperationCompiler(const System& sys, const Operation& op)
      : sig_(sys.sig), op_(op), tree_names_(deftree_var_names(op.tree)) {}

  std::vector<ObjectRule> run() {
    visit(op_.tree.root);
    return std::move(out_);
  }

 private:
  ObjectRule tree_rule(Term lhs, Origin origin) const {
    ObjectRule r;
    r.lhs = Term::head(std::move(lhs));
    r.origin = origin;
    r.var_names = tree_names_;
    r.var_types = op_.tree.var_types;
    r.source_op = op_.symbol;
    return r;
  }

  void visit(const DefTree& t) {
    switch (t.kind) {
      case DefTree::Kind::Branch:
      case DefTree::Kind::IntBranch: {
        for (const auto& c : t.children) visit(c);
        ObjectRule r = tree_rule(t.pattern, Origin::Dispatch);
        Term inner = subterm(t.pattern, t.position);
        r.rhs = Term::head(replace_at(t.pattern, t.position, Term::head(std::move(inner))));
        out_.push_back(std::move(r));
        return;
      }
      case DefTree::Kind::Exempt: {
        ObjectRule r = tree_rule(t.pattern, Origin::Exempt);
        r.aborts = true;
        out_.push_back(std::move(r));
        return;
      }
      case DefTree::Kind::Rule: rule(t); return;
    }
  }

  void rule(const DefTree& t) {
    const SourceRule& src = op_.rules.at(t.rule);
    ObjectRule base;
    base.lhs = Term::head(t.pattern);
    base.var_names = src.var_names;
    base.var_types = src.var_types;
    base.source_op = op_.symbol;
    base.source_rule = t.rule;
    const Term& rhs = src.rhs;

    if (!rhs.is_variable()) {
      bool op_rooted = is_op(rhs, sig_);
      base.origin = op_rooted ? Origin::OpRooted : Origin::CtorRooted;
      base.rhs = op_rooted ? Term::head(rhs) : rhs;
      out_.push_back(std::move(base));
      return;
    }

    std::uint32_t v = rhs.label.var_index();
    TypeId sort = src.var_types.at(v);
    if (sort == sig_.int_type()) {
      ObjectRule inst = base;
      inst.origin = Origin::CollapseInstance;
      inst.lhs = to_lit_var(base.lhs, v);
      inst.rhs = Term::var(v);
      out_.push_back(std::move(inst));
    } else {
      for (SymbolId c : sig_.type(sort).constructors) {
        ObjectRule inst = base;
        inst.origin = Origin::CollapseInstance;
        Term pat = fresh_application(inst, c, sig_, src.var_names.at(v));
        pat.binder = static_cast<std::int32_t>(v);
        inst.lhs = substitute(base.lhs, v, pat);
        inst.rhs = Term::var(v);
        out_.push_back(std::move(inst));
      }
    }
    base.origin = Origin::CollapseDefault;
    base.rhs = Term::head(rhs);
    out_.push_back(std::move(base));
  }

  const Signature& sig_;
  const Operation& op_;
  std::vector<std::string> tree_names_;
  std::vector<ObjectRule> out_;
};

void expand(const ObjectRule& r, const Signature& sig, std::vector<ObjectRule>& out) {
  auto x = head_var(r.rhs);
  if (!x) {
    out.push_back(r);
    return;
  }
  TypeId sort = r.var_types.at(*x);
  if (sort == sig.int_type() && r.origin != Origin::Dispatch) {
    // Dispatch rules never see a literal under H: the literal cases precede them.
    ObjectRule guard = r;
    guard.lhs = to_lit_var(r.lhs, *x);
    guard.rhs = unwrap_var(r.rhs, *x);
    if (guard.rhs.is_variable()) guard.origin = Origin::CollapseInstance;
    expand(guard, sig, out);
  }
  for (SymbolId f : sig.operations_of_sort(sort)) {
    ObjectRule inst = r;
    Term app = fresh_application(inst, f, sig, r.var_names.at(*x));
    inst.lhs = substitute(r.lhs, *x, app);
    inst.rhs = substitute(r.rhs, *x, app);
    expand(inst, sig, out);
  }
}

Term wrap(const Term& t, const System& sys) {
  Term out = t;
  if (!is_op(t, sys.sig)) return out;
  for (auto i : demanded_args(sys, t.label.symbol_id())) {
    Term& a = out.args.at(i);
    if (is_op(a, sys.sig)) a = Term::head(wrap(a, sys));
  }
  return out;
}

void finalize(ObjectProgram& p) {
  for (std::size_t i = 0; i < p.rules.size(); ++i) p.rules[i].priority = i;
}

}  // namespace

std::vector<ObjectRule> compile_operation(const System& sys, const Operation& op) {
  return OperationCompiler(sys, op).run();
}

std::vector<ObjectRule> compile_builtin(const Signature& sig, Builtin b) {
  SymbolId id = sig.builtin_symbol(b);
  TypeId i = sig.int_type();
  auto mk = [&](Term lhs, Origin o, std::vector<std::string> names) {
    ObjectRule r;
    r.lhs = Term::head(std::move(lhs));
    r.origin = o;
    r.var_names = std::move(names);
    r.var_types = {i, i};
    r.source_op = id;
    return r;
  };
  std::vector<ObjectRule> out;
  ObjectRule leaf = mk(Term::symbol(id, {Term::lit_var(0), Term::lit_var(1)}), Origin::Builtin, {"a", "b"});
  leaf.native = b;
  out.push_back(std::move(leaf));
  ObjectRule second = mk(Term::symbol(id, {Term::lit_var(0), Term::var(1)}), Origin::Dispatch, {"a", "y"});
  second.rhs = Term::head(Term::symbol(id, {Term::var(0), Term::head(Term::var(1))}));
  out.push_back(std::move(second));
  ObjectRule first = mk(Term::symbol(id, {Term::var(0), Term::var(1)}), Origin::Dispatch, {"x", "y"});
  first.rhs = Term::head(Term::symbol(id, {Term::head(Term::var(0)), Term::var(1)}));
  out.push_back(std::move(first));
  return out;
}

std::vector<ObjectRule> gen_norm_rules(const System& sys) {
  const auto& sig = sys.sig;
  std::vector<ObjectRule> out;
  auto args_of = [](const Symbol& s, ObjectRule& r) {
    std::vector<Term> args;
    for (std::size_t k = 0; k < s.arity(); ++k) {
      r.var_names.push_back("x" + std::to_string(k + 1));
      r.var_types.push_back(s.arg_types[k]);
      args.push_back(Term::var(static_cast<std::uint32_t>(k)));
    }
    return args;
  };
  for (TypeId t = 0; t < sig.type_count(); ++t) {
    if (sig.type(t).is_int) continue;
    for (SymbolId c : sig.type(t).constructors) {
      ObjectRule r;
      r.origin = Origin::NormCtor;
      auto args = args_of(sig.symbol(c), r);
      std::vector<Term> normed;
      for (const auto& a : args) normed.push_back(Term::norm(a));
      r.lhs = Term::norm(Term::symbol(c, std::move(args)));
      r.rhs = Term::symbol(c, std::move(normed));
      out.push_back(std::move(r));
    }
  }
  if (sig.uses_int()) {
    ObjectRule r;
    r.origin = Origin::NormCtor;
    r.var_names = {"k"};
    r.var_types = {sig.int_type()};
    r.lhs = Term::norm(Term::lit_var(0));
    r.rhs = Term::var(0);
    out.push_back(std::move(r));
  }
  for (SymbolId f : sig.operations()) {
    ObjectRule r;
    r.origin = Origin::NormOp;
    r.source_op = f;
    auto args = args_of(sig.symbol(f), r);
    Term app = Term::symbol(f, std::move(args));
    r.lhs = Term::norm(app);
    r.rhs = Term::norm(Term::head(app));
    out.push_back(std::move(r));
  }
  return out;
}

ObjectProgram phase1(const ObjectProgram& p, const System& sys) {
  ObjectProgram out;
  out.mode = p.mode;
  for (const auto& r : p.rules) {
    if (r.lhs.label.kind == LabelKind::Norm) out.rules.push_back(r);
    else expand(r, sys.sig, out.rules);
  }
  // A literal guard can repeat an Int collapse instance; the copy is dead.
  std::vector<ObjectRule> kept;
  for (auto& r : out.rules)
    if (std::none_of(kept.begin(), kept.end(), [&](const ObjectRule& k) { return is_variant(k.lhs, r.lhs); }))
      kept.push_back(std::move(r));
  out.rules = std::move(kept);
  finalize(out);
  return out;
}

Term tau_term(const Term& t, const Signature& sig) {
  if (t.label.kind == LabelKind::Head) {
    const Term& inner = t.args.at(0);
    if (!is_op(inner, sig))
      throw ValidationError(std::string("tau: H applied to ") + (inner.is_variable() ? "a variable" : "a constructor") +
                            " in " + print_term(t, sig, {}));
    std::vector<Term> args;
    for (const auto& a : inner.args) args.push_back(tau_term(a, sig));
    Term out = Term::special(inner.label.symbol_id(), std::move(args));
    out.binder = inner.binder;
    return out;
  }
  Term out{t.label, {}, t.binder};
  for (const auto& a : t.args) out.args.push_back(tau_term(a, sig));
  return out;
}

ObjectProgram phase2(const ObjectProgram& p, const System& sys) {
  const auto& sig = sys.sig;
  ObjectProgram out;
  out.mode = p.mode;
  for (const auto& r : p.rules) {
    ObjectRule n = r;
    n.lhs = tau_term(r.lhs, sig);
    if (!r.aborts && !r.native) n.rhs = tau_term(r.rhs, sig);
    out.rules.push_back(std::move(n));
  }
  // Bucket by head symbol: f^H in operation order, N last.
  auto ops = sig.operations();
  auto key = [&](const ObjectRule& r) -> std::size_t {
    if (r.lhs.label.kind != LabelKind::Special) return ops.size();
    return static_cast<std::size_t>(std::find(ops.begin(), ops.end(), r.lhs.label.symbol_id()) - ops.begin());
  };
  std::stable_sort(out.rules.begin(), out.rules.end(),
                   [&](const ObjectRule& a, const ObjectRule& b) { return key(a) < key(b); });
  for (SymbolId f : ops)
    if (std::any_of(out.rules.begin(), out.rules.end(),
                    [&](const ObjectRule& r) { return r.lhs.label == Label::special(f); }))
      out.specialized.push_back(f);
  finalize(out);
  return out;
}

std::vector<std::uint32_t> demanded_args(const System& sys, SymbolId op) {
  if (sys.sig.builtin_of(op)) return {0, 1};
  return demanded_positions(sys.operation(op).tree.root);
}

ObjectProgram wrap_needed(const ObjectProgram& p, const System& sys) {
  ObjectProgram out = p;
  for (auto& r : out.rules)
    if (r.origin == Origin::OpRooted) r.rhs = Term::head(wrap(r.rhs.args.at(0), sys));
  return out;
}

ObjectProgram build_program(const System& sys, Mode mode) {
  ObjectProgram cr;
  cr.mode = Mode::CR;
  for (const auto& op : sys.operations) {
    auto rules = compile_operation(sys, op);
    cr.rules.insert(cr.rules.end(), rules.begin(), rules.end());
  }
  for (Builtin b : {Builtin::Add, Builtin::Sub}) {
    if (!sys.sig.is_active(sys.sig.builtin_symbol(b))) continue;
    auto rules = compile_builtin(sys.sig, b);
    cr.rules.insert(cr.rules.end(), rules.begin(), rules.end());
  }
  auto norm = gen_norm_rules(sys);
  cr.rules.insert(cr.rules.end(), norm.begin(), norm.end());
  finalize(cr);
  switch (mode) {
    case Mode::CR: return cr;
    case Mode::TR: {
      auto tr = phase2(phase1(cr, sys), sys);
      tr.mode = Mode::TR;
      return tr;
    }
    case Mode::OR: {
      auto orp = phase2(phase1(wrap_needed(cr, sys), sys), sys);
      orp.mode = Mode::OR;
      return orp;
    }
  }
  return cr;
}

std::string render_rule(const ObjectRule& r, const Signature& sig) {
  std::string line;
  if (r.aborts) {
    line = print_term(r.lhs, sig, r.var_names) + " = abort";
  } else if (r.native) {
    line = print_term(r.lhs, sig, r.var_names) + " = " + r.var_names.at(0) +
           (*r.native == Builtin::Add ? "+" : "-") + r.var_names.at(1);
  } else {
    line = print_rule(r.lhs, r.rhs, sig, r.var_names);
  }
  return line + "  -- " + origin_name(r.origin);
}

std::string render_program(const ObjectProgram& p, const Signature& sig) {
  std::string out;
  for (const auto& r : p.rules) out += render_rule(r, sig) + "\n";
  return out;
}

}  // namespace needle
