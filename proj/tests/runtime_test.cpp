#include <limits>

#include "doctest.h"
#include "needle/error.hpp"
#include "needle/printer.hpp"
#include "needle/runtime.hpp"
#include "support.hpp"

using namespace needle;
using needle::test::load;

namespace {

const ObjectRule& rule_rendered(const ObjectProgram& p, const Signature& sig, const std::string& text) {
  for (const auto& r : p.rules)
    if (render_rule(r, sig) == text) return r;
  FAIL("no rule " << text);
  return p.rules.front();
}

ExprGraph wrap_head(const ExprGraph& e) {
  ExprGraph g = e;
  g.set_root(g.add(Label::head(), {e.root()}, 1000));
  return g;
}

EvalResult run(const std::string& prog, const std::string& expr, Mode m, EvalOptions opts = {}) {
  System sys = load(prog);
  return eval(build_program(sys, m), sys, parse_expr(expr, sys), opts);
}

}  // namespace

TEST_SUITE("runtime") {

TEST_CASE("matching binds variables and counts inspected nodes") {
  System sys = load("append");
  auto cr = build_program(sys, Mode::CR);
  const auto& r = rule_rendered(cr, sys.sig, "H(append(Nil,y)) = H(y)  -- collapse-default");

  ExprGraph g = wrap_head(parse_expr("append(Nil,Cons(2,Nil))", sys));
  std::uint64_t reads = 0;
  auto b = match_rule(r, g, g.root(), &reads);
  REQUIRE(b);
  NodeIndex app = g.node(g.root()).children[0];
  CHECK((*b)[0] == g.node(app).children[1]);
  CHECK(reads == 2);  // append, Nil

  ExprGraph other = wrap_head(parse_expr("append(Cons(1,Nil),Nil)", sys));
  CHECK_FALSE(match_rule(r, other, other.root()));

  System fib = load("fib");
  auto fcr = build_program(fib, Mode::CR);
  const auto& zero = rule_rendered(fcr, fib.sig, "H(fib(0)) = 0  -- ctor-rooted");
  ExprGraph five = wrap_head(parse_expr("fib(5)", fib));
  CHECK_FALSE(match_rule(zero, five, five.root()));
}

TEST_CASE("the computation of append(Cons(1,Nil),Cons(2,Nil)) in C_R") {
  EvalOptions opts;
  opts.trace = true;
  System sys = load("append");
  auto cr = build_program(sys, Mode::CR);
  auto r = eval(cr, sys, parse_expr("append(Cons(1,Nil),Cons(2,Nil))", sys), opts);
  REQUIRE(r.outcome.kind == OutcomeKind::Value);
  CHECK(print_graph(r.outcome.graph, sys.sig) == "Cons(1,Cons(2,Nil))");
  std::string states;
  for (const auto* s : r.trace->states()) states += print_graph(*s, sys.sig) + "\n";
  CHECK(states == test::golden("append_states.txt"));
  CHECK(r.counters.rewrite_steps == 2);
  CHECK(r.counters.shortcut_steps == 0);
  CHECK(r.counters.dispatch_steps == 0);
  CHECK(r.counters.norm_steps == 7);
}

TEST_CASE("outcomes") {
  auto head = run("head", "head(Nil)", Mode::CR);
  CHECK(head.outcome.kind == OutcomeKind::Aborted);
  for (Mode m : {Mode::CR, Mode::TR, Mode::OR}) {
    auto r = run("fib", "fib(10)", m);
    REQUIRE(r.outcome.kind == OutcomeKind::Value);
    CHECK(r.outcome.graph.node(r.outcome.graph.root()).label == Label::literal(55));
    CHECK(run("head", "head(Cons(3,Nil))", m).outcome.graph.node(0).label == Label::literal(3));
  }
  EvalOptions bounded;
  bounded.max_steps = 1000;
  auto loop = run("loop", "loop", Mode::CR, bounded);
  CHECK(loop.outcome.kind == OutcomeKind::StepLimit);
  CHECK(loop.counters.r_steps() == 1000);
  // snd's pattern never looks at the first component.
  auto snd = run("loop", "snd(MkPair(loop,0))", Mode::CR, bounded);
  CHECK(snd.outcome.kind == OutcomeKind::Value);
}

TEST_CASE("builtin arithmetic") {
  CHECK(builtin_apply(Builtin::Add, 1, 0) == 1);
  CHECK(builtin_apply(Builtin::Sub, 7, 2) == 5);
  CHECK(builtin_apply(Builtin::Sub, -3, 4) == -7);
  constexpr auto max = std::numeric_limits<std::int64_t>::max();
  constexpr auto min = std::numeric_limits<std::int64_t>::min();
  CHECK_THROWS_AS(builtin_apply(Builtin::Add, max, 1), EvaluationError);
  CHECK_THROWS_AS(builtin_apply(Builtin::Sub, min, 1), EvaluationError);
  System sys = load("fib");
  CHECK_THROWS_AS(eval(build_program(sys, Mode::CR), sys, parse_expr("add(9223372036854775807, 1)", sys)),
                  EvaluationError);
}

TEST_CASE("C_R never shortcuts; the other modes conserve proper steps") {
  for (const auto& [prog, expr] : std::vector<std::pair<std::string, std::string>>{
           {"length", "length(append(Cons(1,Cons(2,Nil)),Cons(3,Nil)))"},
           {"fib", "fib(9)"},
           {"tree", "sum(graft(Unary(1,Leaf),Binary(Leaf,2,Leaf)))"}}) {
    CAPTURE(prog);
    auto cr = run(prog, expr, Mode::CR);
    auto tr = run(prog, expr, Mode::TR);
    auto orr = run(prog, expr, Mode::OR);
    CHECK(cr.counters.shortcut_steps == 0);
    CHECK(cr.counters.rewrite_steps == tr.counters.r_steps());
    CHECK(cr.counters.rewrite_steps == orr.counters.r_steps());
    CHECK(tr.counters.node_allocations < cr.counters.node_allocations);
    CHECK(orr.counters.node_allocations <= tr.counters.node_allocations);
    CHECK(orr.counters.node_matches < tr.counters.node_matches);
    CHECK(tr.counters.node_matches < cr.counters.node_matches);
  }
}

TEST_CASE("length counters in closed form") {
  // With |l1| = n and |l2| = m, C_R performs 3n + 2m + 2 rewrite steps.
  System sys = load("length");
  for (std::size_t n : {0u, 1u, 5u, 40u}) {
    for (std::size_t m : {0u, 3u, 40u}) {
      auto r = eval(build_program(sys, Mode::CR), sys, test::length_append(sys, n, m));
      CHECK(r.counters.rewrite_steps == 3 * n + 2 * m + 2);
      CHECK(r.outcome.graph.node(r.outcome.graph.root()).label == Label::literal(static_cast<std::int64_t>(n + m)));
    }
  }
}

TEST_CASE("trace formatting") {
  System sys = load("append");
  auto cr = build_program(sys, Mode::CR);
  EvalOptions opts;
  opts.trace = true;
  auto r = eval(cr, sys, parse_expr("append(Nil,Nil)", sys), opts);
  std::string text = format_trace(*r.trace, cr, sys.sig);
  CHECK(text.rfind("step 1: norm-op @node", 0) == 0);
  CHECK(text.find("final: Nil\n") != std::string::npos);
}

TEST_CASE("collection keeps deep results intact") {
  // Large enough to trigger several collections.
  System sys = load("length");
  ExprGraph g;
  NodeIndex a = test::add_list(g, sys, 300000, 0);
  NodeIndex b = test::add_list(g, sys, 300000, 300000);
  g.set_root(g.add(Label::symbol(*sys.sig.find_symbol("append")), {a, b}));
  for (Mode m : {Mode::CR, Mode::TR}) {
    auto r = eval(build_program(sys, m), sys, g);
    REQUIRE(r.outcome.kind == OutcomeKind::Value);
    CHECK(r.outcome.graph.size() == 2 * 600000 + 1);
    const auto& out = r.outcome.graph;
    NodeIndex n = out.root();
    bool ordered = true;
    for (std::int64_t i = 0; i < 600000; ++i) {
      ordered &= out.node(out.node(n).children[0]).label == Label::literal(i);
      n = out.node(n).children[1];
    }
    CHECK(ordered);
  }
}

}  // TEST_SUITE
