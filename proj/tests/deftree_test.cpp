#include <algorithm>
#include <random>

#include "doctest.h"
#include "needle/deftree.hpp"
#include "needle/error.hpp"
#include "needle/printer.hpp"
#include "support.hpp"

using namespace needle;
using needle::test::load;

namespace {

const Operation& op_named(const System& sys, const std::string& name) {
  return sys.operation(*sys.sig.find_symbol(name));
}

// Pairs of tree nodes where neither is an ancestor of the other. The default
// child of a literal branch overlaps its literal siblings by design (they take
// priority), so it is left out.
void disjoint_pairs(const DefTree& t, std::vector<std::pair<const DefTree*, const DefTree*>>& out) {
  std::size_t last = t.children.size() - (t.kind == DefTree::Kind::IntBranch ? 1 : 0);
  for (std::size_t i = 0; i < t.children.size(); ++i) {
    auto left = tree_nodes(t.children[i]);
    for (std::size_t j = i + 1; j < last; ++j)
      for (const auto* r : tree_nodes(t.children[j]))
        for (const auto* l : left) out.emplace_back(l, r);
    disjoint_pairs(t.children[i], out);
  }
}

void check_invariants(const System& sys, const Operation& op) {
  const auto& root = op.tree.root;
  const auto& sym = sys.sig.symbol(op.symbol);
  // Root pattern is f applied to distinct variables.
  REQUIRE(root.pattern.args.size() == sym.arity());
  for (const auto& a : root.pattern.args) CHECK(a.is_variable());

  std::vector<std::size_t> seen;
  for (const auto* n : tree_nodes(root)) {
    if (n->kind == DefTree::Kind::Rule) {
      seen.push_back(n->rule);
      CHECK((is_variant(Term{n->pattern}, op.rules.at(n->rule).lhs) ||
             generalizes(op.rules.at(n->rule).lhs, n->pattern)));
    }
    if (n->is_branch()) {
      auto nodes = tree_nodes(*n);
      CHECK(std::any_of(nodes.begin(), nodes.end(), [](const DefTree* d) { return d->kind == DefTree::Kind::Rule; }));
      for (const auto& c : n->children) CHECK(generalizes(n->pattern, c.pattern));
    }
  }
  std::sort(seen.begin(), seen.end());
  std::vector<std::size_t> all(op.rules.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  CHECK(seen == all);
}

}  // namespace

TEST_SUITE("deftree") {

TEST_CASE("append: one branch at the first argument") {
  System sys = load("append");
  CHECK(render_tree(sys, sys.operations[0]) ==
        "branch append(x1,x2) @1 [x1]\n"
        "  rule append(Nil,y) = y\n"
        "  rule append(Cons(x,xs),y) = Cons(x,append(xs,y))\n");
}

TEST_CASE("head: exempt child for Nil") {
  System sys = load("head");
  CHECK(render_tree(sys, sys.operations[0]) ==
        "branch head(x1) @1 [x1]\n"
        "  exempt head(Nil)\n"
        "  rule head(Cons(x,xs)) = x\n");
}

TEST_CASE("fib: literal children, then the default") {
  System sys = load("fib");
  const auto& t = sys.operations[0].tree.root;
  CHECK(t.kind == DefTree::Kind::IntBranch);
  CHECK(t.literals == std::vector<std::int64_t>{0, 1});
  REQUIRE(t.children.size() == 3);
  CHECK(t.children[2].kind == DefTree::Kind::Rule);
  CHECK(t.children[2].pattern.args[0].label.kind == LabelKind::LitVar);
}

TEST_CASE("nested branches and an exempt leaf in graft") {
  System sys = load("tree");
  CHECK(render_tree(sys, op_named(sys, "graft")) == test::golden("tree_graft.txt"));
}

TEST_CASE("invariants over the corpus") {
  for (const auto& name : test::kCorpus) {
    System sys = load(name);
    for (const auto& op : sys.operations) {
      CAPTURE(sys.sig.symbol(op.symbol).name);
      check_invariants(sys, op);
    }
  }
}

TEST_CASE("patterns of disjoint nodes do not unify") {
  for (const auto& name : test::kCorpus) {
    System sys = load(name);
    for (const auto& op : sys.operations) {
      std::vector<std::pair<const DefTree*, const DefTree*>> pairs;
      disjoint_pairs(op.tree.root, pairs);
      for (auto [a, b] : pairs) {
        CAPTURE(print_term(a->pattern, sys.sig, deftree_var_names(op.tree)));
        CAPTURE(print_term(b->pattern, sys.sig, deftree_var_names(op.tree)));
        CHECK_FALSE(unifiable(a->pattern, b->pattern));
      }
    }
  }
}

TEST_CASE("needed descent") {
  System sys = load("append");
  const auto& tree = sys.operations[0].tree.root;
  ExprGraph e = parse_expr("append(Cons(1,Nil),Cons(2,Nil))", sys);
  auto d = needed_descent(tree, sys.sig, e, e.root());
  CHECK(d.kind == Descent::Kind::Rule);
  CHECK(d.rule == 1);

  ExprGraph nested = parse_expr("append(append(Cons(1,Nil),Cons(2,Nil)),Cons(3,Nil))", sys);
  d = needed_descent(tree, sys.sig, nested, nested.root());
  CHECK(d.kind == Descent::Kind::Descend);
  CHECK(d.node == nested.node(nested.root()).children[0]);

  System head = load("head");
  ExprGraph h = parse_expr("head(Nil)", head);
  CHECK(needed_descent(head.operations[0].tree.root, head.sig, h, h.root()).kind == Descent::Kind::Exempt);
}

TEST_CASE("needed descent is total on random operation-rooted expressions") {
  for (const auto& name : test::kCorpus) {
    System sys = load(name);
    test::ExprGen gen(sys, 7);
    for (int i = 0; i < 300; ++i) {
      Term t = gen.op_rooted(6);
      if (sys.sig.builtin_of(t.label.symbol_id())) continue;
      ExprGraph e = graph_from_term(t);
      const auto& op = sys.operation(t.label.symbol_id());
      CHECK_NOTHROW(needed_descent(op.tree.root, sys.sig, e, e.root()));
    }
  }
}

TEST_CASE("rule order only affects literal order") {
  std::mt19937 rng(3);
  for (const auto& name : test::kCorpus) {
    System sys = load(name);
    for (const auto& op : sys.operations) {
      auto rules = op.rules;
      for (int round = 0; round < 5; ++round) {
        std::shuffle(rules.begin(), rules.end(), rng);
        auto permuted = rules;
        for (std::size_t i = 0; i < permuted.size(); ++i) permuted[i].index = i;
        DefTreeInfo info = build_deftree(sys.sig, op.symbol, permuted);
        auto a = tree_nodes(op.tree.root);
        auto b = tree_nodes(info.root);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
          CHECK(a[i]->kind == b[i]->kind);
          if (a[i]->kind == DefTree::Kind::IntBranch) {
            auto la = a[i]->literals, lb = b[i]->literals;
            std::sort(la.begin(), la.end());
            std::sort(lb.begin(), lb.end());
            CHECK(la == lb);
          } else if (a[i]->kind != DefTree::Kind::Rule) {
            CHECK(a[i]->pattern == b[i]->pattern);
          }
        }
      }
    }
  }
}

TEST_CASE("builtins and foreign rules are rejected") {
  System sys = load("length");
  CHECK_THROWS_AS(build_deftree(sys.sig, sys.sig.builtin_symbol(Builtin::Add), {}), ValidationError);
  const auto& len = op_named(sys, "length");
  const auto& app = op_named(sys, "append");
  CHECK_THROWS_AS(build_deftree(sys.sig, len.symbol, app.rules), ValidationError);
}

}  // TEST_SUITE
