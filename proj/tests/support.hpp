#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "needle/codegen.hpp"
#include "needle/graph.hpp"
#include "needle/runtime.hpp"
#include "needle/system.hpp"

namespace needle::test {

inline const std::vector<std::string> kCorpus = {"append", "length", "fib", "head", "loop", "tree"};

std::string read_text(const std::string& path);
std::string corpus_path(const std::string& name);
System load(const std::string& name);
std::string golden(const std::string& name);

/// Cons(first, Cons(first+1, ... Nil)) with n cells, built without recursion.
NodeIndex add_list(ExprGraph& g, const System& sys, std::size_t n, std::int64_t first = 0);

/// length(append(l1, l2)) with |l1| = n, |l2| = m.
ExprGraph length_append(const System& sys, std::size_t n, std::size_t m);
ExprGraph apply1(const System& sys, const std::string& op, std::int64_t arg);

/// Agreement of outcome class, and of values up to node renaming.
bool outcomes_agree(const Outcome& a, const Outcome& b);

/// Random ground, well-typed expressions.
class ExprGen {
 public:
  ExprGen(const System& sys, std::uint64_t seed);

  /// Expression of the given sort, at most `depth` nodes deep.
  Term ground(TypeId sort, int depth);
  /// Application of a random operation to ground arguments.
  Term op_rooted(int depth);

 private:
  int min_height(TypeId sort) const { return min_height_.at(sort); }

  const System& sys_;
  std::mt19937_64 rng_;
  std::vector<int> min_height_;
  std::vector<SymbolId> ops_;
};

}  // namespace needle::test
