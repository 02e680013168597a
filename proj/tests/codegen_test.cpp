#include <algorithm>

#include "doctest.h"
#include "needle/codegen.hpp"
#include "needle/error.hpp"
#include "needle/printer.hpp"
#include "support.hpp"

using namespace needle;
using needle::test::load;

namespace {

std::vector<std::string> lines(const ObjectProgram& p, const Signature& sig) {
  std::vector<std::string> out;
  for (const auto& r : p.rules) out.push_back(render_rule(r, sig));
  return out;
}

bool contains(const std::vector<std::string>& ls, const std::string& s) {
  return std::find(ls.begin(), ls.end(), s) != ls.end();
}

bool mentions(const Term& t, LabelKind k) {
  if (t.label.kind == k) return true;
  return std::any_of(t.args.begin(), t.args.end(), [&](const Term& a) { return mentions(a, k); });
}

// f^H(args) back to H(f(args)).
Term untau(const Term& t) {
  Term out{t.label, {}, t.binder};
  for (const auto& a : t.args) out.args.push_back(untau(a));
  if (t.label.kind == LabelKind::Special) {
    Term app = Term::symbol(t.label.symbol_id(), std::move(out.args));
    app.binder = t.binder;
    return Term::head(std::move(app));
  }
  return out;
}

// Erasure on rule sides; an rhs variable bound by an as-pattern stands for
// the bound pattern.
Term erase_term(const Term& t) {
  if (t.label.kind == LabelKind::Head || t.label.kind == LabelKind::Norm) return erase_term(t.args[0]);
  Term out{t.label.kind == LabelKind::Special ? Label::symbol(t.label.symbol_id()) : t.label, {}, -1};
  if (out.label.kind == LabelKind::LitVar) out.label = Label::var(out.label.var_index());
  for (const auto& a : t.args) out.args.push_back(erase_term(a));
  return out;
}

void collect_binders(const Term& t, std::vector<std::pair<std::uint32_t, Term>>& out) {
  if (t.binder >= 0) out.emplace_back(static_cast<std::uint32_t>(t.binder), erase_term(t));
  for (const auto& a : t.args) collect_binders(a, out);
}

// One-way match of a source pattern against an (erased) rule side.
bool instance_of(const Term& pattern, const Term& t, std::vector<std::optional<Term>>& sub) {
  if (pattern.label.kind == LabelKind::Var) {
    auto& slot = sub.at(pattern.label.var_index());
    if (slot) return *slot == t;
    slot = t;
    return true;
  }
  if (pattern.label != t.label || pattern.args.size() != t.args.size()) return false;
  for (std::size_t i = 0; i < t.args.size(); ++i)
    if (!instance_of(pattern.args[i], t.args[i], sub)) return false;
  return true;
}

Term substitute(const Term& t, const std::vector<std::optional<Term>>& sub) {
  if (t.label.kind == LabelKind::Var) return *sub.at(t.label.var_index());
  Term out{t.label, {}, -1};
  for (const auto& a : t.args) out.args.push_back(substitute(a, sub));
  return out;
}

}  // namespace

TEST_SUITE("codegen") {

TEST_CASE("append object code") {
  System sys = load("append");
  auto cr = build_program(sys, Mode::CR);
  CHECK(render_program(cr, sys.sig) == test::golden("append_cr.txt"));
  CHECK(cr.count(LabelKind::Head) == 5);
  auto tr = build_program(sys, Mode::TR);
  CHECK(render_program(tr, sys.sig) == test::golden("append_tr.txt"));
}

TEST_CASE("phase 1 then phase 2 on the collapsing default of append") {
  System sys = load("append");
  auto cr = build_program(sys, Mode::CR);
  auto p1 = phase1(cr, sys);
  auto l1 = lines(p1, sys.sig);
  CHECK(contains(l1, "H(append(Nil,append(y1,y2))) = H(append(y1,y2))  -- collapse-default"));
  CHECK(contains(l1, "H(append(append(x1_1,x1_2),x2)) = H(append(H(append(x1_1,x1_2)),x2))  -- dispatch"));
  auto p2 = phase2(p1, sys);
  CHECK(contains(lines(p2, sys.sig), "append^H(Nil,append(y1,y2)) = append^H(y1,y2)  -- collapse-default"));
}

TEST_CASE("head: instance, exempt, dispatch") {
  System sys = load("head");
  auto l = lines(build_program(sys, Mode::CR), sys.sig);
  REQUIRE(l.size() >= 4);
  CHECK(l[0] == "H(head(Nil)) = abort  -- exempt");
  CHECK(l[1] == "H(head(Cons(#x,xs))) = x  -- collapse-instance");
  CHECK(l[2] == "H(head(Cons(x,xs))) = H(x)  -- collapse-default");
  CHECK(l[3] == "H(head(x1)) = H(head(H(x1)))  -- dispatch");
}

TEST_CASE("length: the rules of the first benchmark") {
  System sys = load("length");
  auto cr = lines(build_program(sys, Mode::CR), sys.sig);
  CHECK(contains(cr, "H(length(Nil)) = 0  -- ctor-rooted"));
  CHECK(contains(cr, "H(length(Cons(_,xs))) = H(add(1,length(xs)))  -- op-rooted"));
  auto tr = lines(build_program(sys, Mode::TR), sys.sig);
  CHECK(contains(tr, "length^H(Cons(_,xs)) = add^H(1,length(xs))  -- op-rooted"));
  auto wrapped = lines(wrap_needed(build_program(sys, Mode::CR), sys), sys.sig);
  CHECK(contains(wrapped, "H(length(Cons(_,xs))) = H(add(1,H(length(xs))))  -- op-rooted"));
  auto orl = lines(build_program(sys, Mode::OR), sys.sig);
  CHECK(contains(orl, "length^H(Cons(_,xs)) = add^H(1,length^H(xs))  -- op-rooted"));
}

TEST_CASE("fib in O_R wraps every needed node") {
  System sys = load("fib");
  auto l = lines(build_program(sys, Mode::OR), sys.sig);
  CHECK(contains(l, "fib^H(#n) = add^H(fib^H(sub^H(n,1)),fib^H(sub^H(n,2)))  -- op-rooted"));
  CHECK(render_program(build_program(sys, Mode::OR), sys.sig) == test::golden("fib_or.txt"));
  CHECK(demanded_args(sys, *sys.sig.find_symbol("fib")) == std::vector<std::uint32_t>{0});
  CHECK(demanded_args(sys, sys.sig.builtin_symbol(Builtin::Add)) == std::vector<std::uint32_t>{0, 1});
}

TEST_CASE("demanded positions intersect over all paths") {
  System sys = load("tree");
  CHECK(demanded_args(sys, *sys.sig.find_symbol("graft")) == std::vector<std::uint32_t>{0});
  System loop = load("loop");
  CHECK(demanded_args(loop, *loop.sig.find_symbol("loop")).empty());
}

TEST_CASE("norm rules") {
  System sys = load("append");
  auto n = gen_norm_rules(sys);
  std::vector<std::string> l;
  for (const auto& r : n) l.push_back(render_rule(r, sys.sig));
  CHECK(l == std::vector<std::string>{"N(Nil) = Nil  -- norm-ctor", "N(Cons(x1,x2)) = Cons(N(x1),N(x2))  -- norm-ctor",
                                      "N(#k) = k  -- norm-ctor", "N(append(x1,x2)) = N(H(append(x1,x2)))  -- norm-op"});
  // No Int anywhere: no literal rule.
  System bools = parse_system("data B = T | F; op not(B) -> B: not(T) = F not(F) = T ;");
  for (const auto& r : gen_norm_rules(bools)) CHECK(r.lhs.args[0].label.kind != LabelKind::LitVar);
}

TEST_CASE("phase 1 instantiates with every operation of the sort") {
  System sys = parse_system(
      "data B = T | F;\n"
      "op f(B) -> B: f(x) = x ;\n"
      "op g() -> B: g = T ;\n"
      "op h(B) -> B: h(T) = T ;\n");
  auto p1 = phase1(build_program(sys, Mode::CR), sys);
  auto l = lines(p1, sys.sig);
  CHECK(contains(l, "H(f(f(x1))) = H(f(x1))  -- collapse-default"));
  CHECK(contains(l, "H(f(g())) = H(g())  -- collapse-default"));
  CHECK(contains(l, "H(f(h(x1))) = H(h(x1))  -- collapse-default"));
  // A rule with no H over a variable is unchanged.
  CHECK(contains(l, "H(g()) = T  -- ctor-rooted"));
}

TEST_CASE("phase 2 leaves no H") {
  for (const auto& name : test::kCorpus) {
    System sys = load(name);
    for (Mode m : {Mode::TR, Mode::OR}) {
      auto p = build_program(sys, m);
      for (const auto& r : p.rules) {
        CHECK_FALSE(mentions(r.lhs, LabelKind::Head));
        if (!r.aborts && !r.native) CHECK_FALSE(mentions(r.rhs, LabelKind::Head));
      }
    }
  }
  System sys = load("append");
  CHECK_THROWS_AS(phase2(build_program(sys, Mode::CR), sys), ValidationError);
}

TEST_CASE("tau round trip") {
  for (const auto& name : test::kCorpus) {
    System sys = load(name);
    auto tr = build_program(sys, Mode::TR);
    ObjectProgram back = tr;
    for (auto& r : back.rules) {
      r.lhs = untau(r.lhs);
      if (!r.aborts && !r.native) r.rhs = untau(r.rhs);
    }
    CHECK(render_program(phase2(back, sys), sys.sig) == render_program(tr, sys.sig));
  }
}

TEST_CASE("every operation has a most general rule") {
  // The syntactic form holds for C_R; phase 1 removes rules whose variable
  // sort has no operations, so T_R and O_R are covered by the dispatch
  // property test instead.
  for (const auto& name : test::kCorpus) {
    System sys = load(name);
    auto cr = build_program(sys, Mode::CR);
    for (SymbolId f : sys.sig.operations()) {
      std::vector<Term> vars;
      for (std::size_t i = 0; i < sys.sig.symbol(f).arity(); ++i) vars.push_back(Term::var(static_cast<std::uint32_t>(i)));
      Term general = Term::head(Term::symbol(f, vars));
      CHECK(std::any_of(cr.rules.begin(), cr.rules.end(), [&](const ObjectRule& r) { return generalizes(r.lhs, general); }));
    }
  }
}

TEST_CASE("each rule erases to an identity or one source step") {
  for (const auto& name : test::kCorpus) {
    System sys = load(name);
    for (Mode m : {Mode::CR, Mode::TR, Mode::OR}) {
      auto p = build_program(sys, m);
      for (const auto& r : p.rules) {
        if (r.aborts || r.native) continue;
        CAPTURE(render_rule(r, sys.sig));
        Term lhs = erase_term(r.lhs);
        Term rhs = erase_term(r.rhs);
        std::vector<std::pair<std::uint32_t, Term>> binders;
        collect_binders(r.lhs, binders);
        if (rhs.label.kind == LabelKind::Var)
          for (const auto& [v, bound] : binders)
            if (rhs.label.var_index() == v) rhs = bound;
        if (!r.is_proper()) {
          CHECK(lhs == rhs);
          continue;
        }
        const SourceRule& src = sys.operation(r.source_op).rules.at(r.source_rule);
        std::vector<std::optional<Term>> sub(src.var_names.size());
        REQUIRE(instance_of(src.lhs, lhs, sub));
        CHECK(substitute(src.rhs, sub) == rhs);
      }
    }
  }
}

TEST_CASE("rendering is deterministic") {
  System a = load("tree");
  System b = load("tree");
  for (Mode m : {Mode::CR, Mode::TR, Mode::OR})
    CHECK(render_program(build_program(a, m), a.sig) == render_program(build_program(b, m), b.sig));
}

}  // TEST_SUITE
