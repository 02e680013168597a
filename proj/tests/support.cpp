#include "support.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace needle::test {

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string corpus_path(const std::string& name) { return std::string(NEEDLE_CORPUS_DIR) + "/" + name + ".rw"; }

System load(const std::string& name) { return parse_system(read_text(corpus_path(name))); }

std::string golden(const std::string& name) { return read_text(std::string(NEEDLE_GOLDEN_DIR) + "/" + name); }

NodeIndex add_list(ExprGraph& g, const System& sys, std::size_t n, std::int64_t first) {
  SymbolId nil = *sys.sig.find_symbol("Nil");
  SymbolId cons = *sys.sig.find_symbol("Cons");
  NodeIndex tail = g.add(Label::symbol(nil));
  for (std::size_t i = n; i-- > 0;) {
    NodeIndex head = g.add(Label::literal(first + static_cast<std::int64_t>(i)));
    tail = g.add(Label::symbol(cons), {head, tail});
  }
  return tail;
}

ExprGraph length_append(const System& sys, std::size_t n, std::size_t m) {
  ExprGraph g;
  NodeIndex a = add_list(g, sys, n, 0);
  NodeIndex b = add_list(g, sys, m, static_cast<std::int64_t>(n));
  NodeIndex app = g.add(Label::symbol(*sys.sig.find_symbol("append")), {a, b});
  g.set_root(g.add(Label::symbol(*sys.sig.find_symbol("length")), {app}));
  return g;
}

ExprGraph apply1(const System& sys, const std::string& op, std::int64_t arg) {
  ExprGraph g;
  NodeIndex k = g.add(Label::literal(arg));
  g.set_root(g.add(Label::symbol(*sys.sig.find_symbol(op)), {k}));
  return g;
}

bool outcomes_agree(const Outcome& a, const Outcome& b) {
  if (a.kind != b.kind) return false;
  return a.kind != OutcomeKind::Value || graphs_equal_mod_renaming(a.graph, b.graph);
}

ExprGen::ExprGen(const System& sys, std::uint64_t seed) : sys_(sys), rng_(seed), ops_(sys.sig.operations()) {
  const auto& sig = sys.sig;
  constexpr int kInf = 1 << 20;
  min_height_.assign(sig.type_count(), kInf);
  min_height_[sig.int_type()] = 1;
  for (bool changed = true; changed;) {
    changed = false;
    for (TypeId t = 0; t < sig.type_count(); ++t) {
      for (SymbolId c : sig.type(t).constructors) {
        int h = 1;
        for (TypeId a : sig.symbol(c).arg_types) h = std::max(h, min_height_[a] + 1);
        if (h < min_height_[t]) {
          min_height_[t] = h;
          changed = true;
        }
      }
    }
  }
}

Term ExprGen::ground(TypeId sort, int depth) {
  const auto& sig = sys_.sig;
  std::vector<SymbolId> choices;
  auto fits = [&](SymbolId s) {
    for (TypeId a : sig.symbol(s).arg_types)
      if (min_height(a) > depth - 1) return false;
    return true;
  };
  for (SymbolId c : sig.type(sort).constructors)
    if (fits(c)) choices.push_back(c);
  // Operations are drawn less often than constructors to keep values small.
  std::vector<SymbolId> ops;
  for (SymbolId f : sig.operations_of_sort(sort))
    if (fits(f)) ops.push_back(f);
  bool is_int = sort == sig.int_type();
  std::uniform_int_distribution<int> coin(0, 2);
  if (!ops.empty() && (choices.empty() && !is_int ? true : coin(rng_) == 0)) {
    SymbolId f = ops[std::uniform_int_distribution<std::size_t>(0, ops.size() - 1)(rng_)];
    std::vector<Term> args;
    for (TypeId a : sig.symbol(f).arg_types) args.push_back(ground(a, depth - 1));
    return Term::symbol(f, std::move(args));
  }
  if (is_int) return Term::literal(std::uniform_int_distribution<std::int64_t>(-2, 9)(rng_));
  SymbolId c = choices[std::uniform_int_distribution<std::size_t>(0, choices.size() - 1)(rng_)];
  std::vector<Term> args;
  for (TypeId a : sig.symbol(c).arg_types) args.push_back(ground(a, depth - 1));
  return Term::symbol(c, std::move(args));
}

Term ExprGen::op_rooted(int depth) {
  SymbolId f = ops_[std::uniform_int_distribution<std::size_t>(0, ops_.size() - 1)(rng_)];
  std::vector<Term> args;
  for (TypeId a : sys_.sig.symbol(f).arg_types) args.push_back(ground(a, depth - 1));
  return Term::symbol(f, std::move(args));
}

}  // namespace needle::test
