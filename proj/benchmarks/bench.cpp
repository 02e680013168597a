// Wall-clock and counters for length(l1 ++ l2) and fib in each mode.
#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "needle/runtime.hpp"
#include "needle/system.hpp"

using namespace needle;

namespace {

System load(const char* name) {
  std::ifstream in(std::string(NEEDLE_CORPUS_DIR) + "/" + name + ".rw");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_system(ss.str());
}

ExprGraph length_append(const System& sys, std::int64_t n) {
  const auto& sig = sys.sig;
  ExprGraph g;
  auto list = [&](std::int64_t k) {
    NodeIndex tail = g.add(Label::symbol(*sig.find_symbol("Nil")));
    for (std::int64_t i = k - 1; i >= 0; --i)
      tail = g.add(Label::symbol(*sig.find_symbol("Cons")), {g.add(Label::literal(i)), tail});
    return tail;
  };
  NodeIndex a = list(n), b = list(n);
  NodeIndex app = g.add(Label::symbol(*sig.find_symbol("append")), {a, b});
  g.set_root(g.add(Label::symbol(*sig.find_symbol("length")), {app}));
  return g;
}

ExprGraph fib_of(const System& sys, std::int64_t n) {
  ExprGraph g;
  NodeIndex k = g.add(Label::literal(n));
  g.set_root(g.add(Label::symbol(*sys.sig.find_symbol("fib")), {k}));
  return g;
}

void report(benchmark::State& state, const Counters& c) {
  state.counters["rewrite"] = static_cast<double>(c.rewrite_steps);
  state.counters["shortcut"] = static_cast<double>(c.shortcut_steps);
  state.counters["alloc"] = static_cast<double>(c.node_allocations);
  state.counters["data_alloc"] = static_cast<double>(c.data_allocations);
  state.counters["matches"] = static_cast<double>(c.node_matches);
}

void BM_length(benchmark::State& state) {
  static const System sys = load("length");
  auto mode = static_cast<Mode>(state.range(0));
  auto prog = build_program(sys, mode);
  ExprGraph e = length_append(sys, state.range(1));
  Counters last;
  for (auto _ : state) last = eval(prog, sys, e).counters;
  report(state, last);
  state.SetLabel(mode_name(mode));
}

void BM_fib(benchmark::State& state) {
  static const System sys = load("fib");
  auto mode = static_cast<Mode>(state.range(0));
  auto prog = build_program(sys, mode);
  ExprGraph e = fib_of(sys, state.range(1));
  Counters last;
  for (auto _ : state) last = eval(prog, sys, e).counters;
  report(state, last);
  state.SetLabel(mode_name(mode));
}

}  // namespace

BENCHMARK(BM_length)->ArgsProduct({{0, 1, 2}, {1000, 100000}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_fib)->ArgsProduct({{0, 1, 2}, {20, 25}})->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
