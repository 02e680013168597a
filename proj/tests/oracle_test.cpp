#include <utility>

#include "doctest.h"
#include "needle/oracle.hpp"
#include "needle/printer.hpp"
#include "support.hpp"

using namespace needle;
using needle::test::load;

namespace {

Trace traced(const System& sys, const ObjectProgram& p, const std::string& expr) {
  EvalOptions opts;
  opts.trace = true;
  return *eval(p, sys, parse_expr(expr, sys), opts).trace;
}

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("needed redexes") {
  System sys = load("append");
  ExprGraph e = parse_expr("append(Cons(1,Nil),Cons(2,Nil))", sys);
  auto r = find_needed_redex(sys, e);
  CHECK(r.kind == NeededRedex::Kind::Redex);
  CHECK(r.node == e.root());
  CHECK(r.rule == 1);

  ExprGraph nested = parse_expr("append(append(Nil,Nil),Nil)", sys);
  r = find_needed_redex(sys, nested);
  CHECK(r.kind == NeededRedex::Kind::Redex);
  CHECK(r.node == nested.node(nested.root()).children[0]);
  CHECK(r.rule == 0);

  // Below a constructor the leftmost operation comes first.
  ExprGraph under = parse_expr("Cons(1,append(Nil,Nil))", sys);
  r = find_needed_redex(sys, under);
  CHECK(r.node == under.node(under.root()).children[1]);

  CHECK(find_needed_redex(sys, parse_expr("Cons(1,Nil)", sys)).kind == NeededRedex::Kind::None);

  System head = load("head");
  CHECK(find_needed_redex(head, parse_expr("head(Nil)", head)).kind == NeededRedex::Kind::Exempt);

  System fib = load("fib");
  ExprGraph f = parse_expr("add(fib(1),sub(3,1))", fib);
  r = find_needed_redex(fib, f);
  CHECK(r.node == f.node(f.root()).children[0]);
  ExprGraph g = parse_expr("add(2,sub(3,1))", fib);
  r = find_needed_redex(fib, g);
  CHECK(r.builtin);
  CHECK(r.node == g.node(g.root()).children[1]);
}

TEST_CASE("descent path ends at the redex") {
  System sys = load("length");
  ExprGraph e = parse_expr("length(append(append(Nil,Nil),Nil))", sys);
  auto path = descent_path(sys, e, e.root());
  REQUIRE(path.size() == 3);
  CHECK(path.front() == e.root());
  CHECK(path.back() == find_needed_redex(sys, e).node);
}

TEST_CASE("evaluation") {
  System len = load("length");
  auto r = oracle_eval(len, parse_expr("length(append(Cons(7,Nil),Nil))", len));
  REQUIRE(r.outcome.kind == OutcomeKind::Value);
  CHECK(print_graph(r.outcome.graph, len.sig) == "1");
  // append twice, length twice, add once.
  CHECK(r.steps == 5);

  System head = load("head");
  auto h = oracle_eval(head, parse_expr("Cons(head(Nil),Nil)", head));
  CHECK(h.outcome.kind == OutcomeKind::Aborted);
  CHECK(print_graph(h.outcome.graph, head.sig) == "head(Nil)");

  System fib = load("fib");
  auto f = oracle_eval(fib, parse_expr("fib(10)", fib));
  CHECK(print_graph(f.outcome.graph, fib.sig) == "55");

  System loop = load("loop");
  auto l = oracle_eval(loop, parse_expr("loop", loop), 50);
  CHECK(l.outcome.kind == OutcomeKind::StepLimit);
  CHECK(l.steps == 50);
  CHECK(print_graph(oracle_eval(loop, parse_expr("snd(MkPair(loop,4))", loop), 50).outcome.graph, loop.sig) == "4");
}

TEST_CASE("allocations count the fresh nodes of contracta") {
  System sys = load("append");
  // Cons(x, append(xs, y)) builds two nodes; append(Nil, y) = y builds none.
  auto r = oracle_eval(sys, parse_expr("append(Cons(1,Nil),Cons(2,Nil))", sys));
  CHECK(r.steps == 2);
  CHECK(r.allocations == 2);
}

TEST_CASE("the oracle and C_R take the same proper steps") {
  for (const auto& [prog, expr] : std::vector<std::pair<std::string, std::string>>{
           {"append", "append(append(Cons(1,Nil),Nil),Cons(2,Nil))"},
           {"fib", "fib(5)"},
           {"tree", "sum(graft(Binary(Leaf,1,Leaf),Unary(2,Leaf)))"},
           {"loop", "snd(MkPair(loop,0))"}}) {
    CAPTURE(prog);
    System sys = load(prog);
    auto cr = build_program(sys, Mode::CR);
    auto report = validate_c_r_trace(sys, cr, traced(sys, cr, expr));
    CHECK(report.violations.empty());
    CHECK(report.proper_steps == report.oracle_steps);
    CHECK(report.render().rfind("PASS", 0) == 0);
  }
}

TEST_CASE("corrupted traces are caught") {
  System sys = load("append");
  auto cr = build_program(sys, Mode::CR);
  Trace good = traced(sys, cr, "append(Cons(1,Nil),Cons(2,Nil))");
  REQUIRE(good.steps.size() > 3);

  Trace swapped = good;
  std::swap(swapped.steps[1].state, swapped.steps[2].state);
  CHECK_FALSE(validate_c_r_trace(sys, cr, swapped).passed());

  Trace wrong_rule = good;
  for (auto& s : wrong_rule.steps)
    if (cr.rules[s.rule].origin == Origin::CtorRooted) {
      s.rule = 0;  // collapse-instance on Nil: does not apply
      break;
    }
  auto report = validate_c_r_trace(sys, cr, wrong_rule);
  CHECK_FALSE(report.passed());
  CHECK(report.render().find("FAIL violations=") != std::string::npos);
}

}  // TEST_SUITE
