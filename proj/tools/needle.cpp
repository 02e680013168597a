// needle: check, inspect, compile and run rewrite systems.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "needle/codegen.hpp"
#include "needle/error.hpp"
#include "needle/oracle.hpp"
#include "needle/printer.hpp"
#include "needle/runtime.hpp"
#include "needle/system.hpp"

namespace {

using namespace needle;

enum Exit { kOk = 0, kUsage = 1, kInvalid = 2, kAborted = 3, kStepLimit = 4 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::uint64_t default_max_steps() {
  if (const char* env = std::getenv("NEEDLE_MAX_STEPS")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && end != env) return v;
    throw UsageError("NEEDLE_MAX_STEPS is not a number: " + std::string(env));
  }
  return kDefaultMaxSteps;
}

Mode parse_mode(const std::string& m) {
  if (m == "cr") return Mode::CR;
  if (m == "tr") return Mode::TR;
  if (m == "or") return Mode::OR;
  throw UsageError("unknown mode '" + m + "'");
}

std::string mode_title(Mode m) {
  switch (m) {
    case Mode::CR: return "C_R";
    case Mode::TR: return "T_R";
    case Mode::OR: return "O_R";
  }
  return "?";
}

int exit_for(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::Value: return kOk;
    case OutcomeKind::Aborted: return kAborted;
    case OutcomeKind::StepLimit: return kStepLimit;
  }
  return kOk;
}

void print_outcome(const Outcome& o, const Signature& sig) {
  switch (o.kind) {
    case OutcomeKind::Value: std::cout << print_graph(o.graph, sig) << "\n"; break;
    case OutcomeKind::Aborted: std::cout << "ABORT " << print_graph(o.graph, sig) << "\n"; break;
    case OutcomeKind::StepLimit: std::cout << "STEP LIMIT\n"; break;
  }
}

void print_counters(const Counters& c) {
  std::cout << "rewrite-steps " << c.rewrite_steps << "\n"
            << "shortcut-steps " << c.shortcut_steps << "\n"
            << "dispatch-steps " << c.dispatch_steps << "\n"
            << "norm-steps " << c.norm_steps << "\n"
            << "node-allocations " << c.node_allocations << "\n"
            << "data-allocations " << c.data_allocations << "\n"
            << "node-matches " << c.node_matches << "\n";
}

int cmd_check(const std::string& file) {
  System sys = parse_system(read_file(file));
  for (const auto& op : sys.operations) {
    const auto& s = sys.sig.symbol(op.symbol);
    auto nodes = tree_nodes(op.tree.root);
    std::size_t branches = 0, exempt = 0;
    for (const auto* n : nodes) {
      branches += n->is_branch();
      exempt += n->kind == DefTree::Kind::Exempt;
    }
    std::cout << s.name << "/" << s.arity() << ": " << op.rules.size() << " rule(s), " << branches
              << " branch node(s), " << exempt << " exempt node(s)\n";
  }
  std::cout << "ok\n";
  return kOk;
}

int cmd_tree(const std::string& file, const std::string& only) {
  System sys = parse_system(read_file(file));
  bool found = only.empty();
  for (const auto& op : sys.operations) {
    const auto& name = sys.sig.symbol(op.symbol).name;
    if (!only.empty() && name != only) continue;
    found = true;
    std::cout << render_tree(sys, op);
  }
  if (!found) throw UsageError("no operation named '" + only + "'");
  return kOk;
}

int cmd_compile(const std::string& file, const std::string& mode) {
  System sys = parse_system(read_file(file));
  std::cout << render_program(build_program(sys, parse_mode(mode)), sys.sig);
  return kOk;
}

int cmd_eval(const std::string& file, const std::string& expr, const std::string& mode, bool trace,
             std::uint64_t max_steps) {
  System sys = parse_system(read_file(file));
  ExprGraph e = parse_expr(expr, sys);
  if (mode == "source") {
    auto r = oracle_eval(sys, e, max_steps, trace);
    if (trace)
      for (std::size_t i = 0; i < r.states.size(); ++i)
        std::cout << "state " << i << ": " << print_graph(r.states[i], sys.sig) << "\n";
    print_outcome(r.outcome, sys.sig);
    std::cout << "steps " << r.steps << "\n"
              << "node-allocations " << r.allocations << "\n";
    return exit_for(r.outcome.kind);
  }
  auto prog = build_program(sys, parse_mode(mode));
  EvalOptions opts;
  opts.max_steps = max_steps;
  opts.trace = trace;
  auto r = eval(prog, sys, e, opts);
  if (r.trace) std::cout << format_trace(*r.trace, prog, sys.sig);
  print_outcome(r.outcome, sys.sig);
  print_counters(r.counters);
  return exit_for(r.outcome.kind);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

int cmd_bench(const std::string& file, const std::string& expr, const std::string& modes, std::uint64_t max_steps) {
  System sys = parse_system(read_file(file));
  ExprGraph e = parse_expr(expr, sys);
  std::vector<Mode> ms;
  for (const auto& m : split(modes, ',')) ms.push_back(parse_mode(m));
  // The denominator is always rewrite(C_R), whether or not C_R is listed.
  EvalOptions opts;
  opts.max_steps = max_steps;
  auto base = eval(build_program(sys, Mode::CR), sys, e, opts);
  if (base.outcome.kind != OutcomeKind::Value) {
    std::cerr << "error: C_R evaluation did not produce a value (" << outcome_name(base.outcome.kind) << ")\n";
    return exit_for(base.outcome.kind);
  }
  std::vector<Counters> cs;
  for (Mode m : ms) {
    auto r = m == Mode::CR ? base : eval(build_program(sys, m), sys, e, opts);
    if (r.outcome.kind != OutcomeKind::Value) {
      std::cerr << "error: " << mode_title(m) << " evaluation did not produce a value\n";
      return exit_for(r.outcome.kind);
    }
    cs.push_back(r.counters);
  }
  double scale = base.counters.rewrite_steps ? 10.0 / static_cast<double>(base.counters.rewrite_steps) : 0.0;
  struct Row {
    const char* name;
    std::uint64_t Counters::*field;
  };
  const Row rows[] = {{"rewrite steps", &Counters::rewrite_steps},     {"shortcut steps", &Counters::shortcut_steps},
                      {"dispatch steps", &Counters::dispatch_steps},   {"norm steps", &Counters::norm_steps},
                      {"node allocations", &Counters::node_allocations}, {"data allocations", &Counters::data_allocations},
                      {"node matches", &Counters::node_matches}};
  auto header = [&] {
    std::printf("%-18s", "");
    for (Mode m : ms) std::printf("%14s", mode_title(m).c_str());
    std::printf("\n");
  };
  std::printf("per 10 rewrite steps of C_R (rewrite(C_R) = %llu)\n",
              static_cast<unsigned long long>(base.counters.rewrite_steps));
  header();
  for (const auto& row : rows) {
    std::printf("%-18s", row.name);
    for (const auto& c : cs) std::printf("%14.2f", static_cast<double>(c.*row.field) * scale);
    std::printf("\n");
  }
  std::printf("\nraw\n");
  header();
  for (const auto& row : rows) {
    std::printf("%-18s", row.name);
    for (const auto& c : cs) std::printf("%14llu", static_cast<unsigned long long>(c.*row.field));
    std::printf("\n");
  }
  return kOk;
}

int cmd_validate(const std::string& file, const std::string& expr, std::uint64_t max_steps) {
  System sys = parse_system(read_file(file));
  ExprGraph e = parse_expr(expr, sys);
  auto cr = build_program(sys, Mode::CR);
  EvalOptions opts;
  opts.max_steps = max_steps;
  opts.trace = true;
  auto traced = eval(cr, sys, e, opts);
  auto report = validate_c_r_trace(sys, cr, *traced.trace, max_steps);

  auto oracle = oracle_eval(sys, e, max_steps);
  std::cout << "source: " << outcome_name(oracle.outcome.kind) << "\n";
  bool agree = true;
  for (Mode m : {Mode::CR, Mode::TR, Mode::OR}) {
    opts.trace = false;
    auto r = m == Mode::CR ? traced : eval(build_program(sys, m), sys, e, opts);
    bool same = r.outcome.kind == oracle.outcome.kind &&
                (r.outcome.kind != OutcomeKind::Value || graphs_equal_mod_renaming(r.outcome.graph, oracle.outcome.graph));
    agree &= same;
    std::cout << mode_title(m) << ": " << outcome_name(r.outcome.kind) << (same ? "" : " (disagrees with source)")
              << "\n";
  }
  if (oracle.outcome.kind == OutcomeKind::Value) std::cout << "value: " << print_graph(oracle.outcome.graph, sys.sig) << "\n";
  if (!agree) report.violations.push_back("evaluators disagree on the outcome");
  std::cout << report.render();
  return report.passed() ? kOk : kInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compiler and instrumented evaluator for inductively sequential rewrite systems"};
  app.require_subcommand(1);
  std::string file, expr, mode = "cr", eval_mode = "cr", modes = "cr,tr,or", op;
  bool trace = false;
  std::uint64_t max_steps = 0;

  auto* check = app.add_subcommand("check", "parse and validate a program");
  check->add_option("file", file, "program (.rw)")->required();
  auto* tree = app.add_subcommand("tree", "print definitional trees");
  tree->add_option("file", file, "program (.rw)")->required();
  tree->add_option("--op", op, "only this operation");
  auto* compile = app.add_subcommand("compile", "print object code");
  compile->add_option("file", file, "program (.rw)")->required();
  compile->add_option("--mode", mode, "cr, tr or or")->check(CLI::IsMember({"cr", "tr", "or"}));
  auto* evalc = app.add_subcommand("eval", "evaluate an expression");
  evalc->add_option("file", file, "program (.rw)")->required();
  evalc->add_option("expr", expr, "closed expression")->required();
  evalc->add_option("--mode", eval_mode, "source, cr, tr or or")->check(CLI::IsMember({"source", "cr", "tr", "or"}));
  evalc->add_flag("--trace", trace, "print every state");
  evalc->add_option("--max-steps", max_steps, "bound on source-rule steps");
  auto* bench = app.add_subcommand("bench", "compare counters across object programs");
  bench->add_option("file", file, "program (.rw)")->required();
  bench->add_option("expr", expr, "closed expression")->required();
  bench->add_option("--modes", modes, "comma-separated subset of cr,tr,or");
  bench->add_option("--max-steps", max_steps, "bound on source-rule steps");
  auto* validate = app.add_subcommand("validate", "check a C_R trace against the source system");
  validate->add_option("file", file, "program (.rw)")->required();
  validate->add_option("expr", expr, "closed expression")->required();
  validate->add_option("--max-steps", max_steps, "bound on source-rule steps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (max_steps == 0) max_steps = default_max_steps();
    if (*check) return cmd_check(file);
    if (*tree) return cmd_tree(file, op);
    if (*compile) return cmd_compile(file, mode);
    if (*evalc) return cmd_eval(file, expr, eval_mode, trace, max_steps);
    if (*bench) return cmd_bench(file, expr, modes, max_steps);
    if (*validate) return cmd_validate(file, expr, max_steps);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const SyntaxError& e) {
    std::cerr << file << ":" << e.what() << "\n";
    return kUsage;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
