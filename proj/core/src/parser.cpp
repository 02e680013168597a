#include <cctype>
#include <charconv>
#include <optional>
#include <unordered_map>

#include "needle/error.hpp"
#include "needle/printer.hpp"
#include "needle/system.hpp"

namespace needle {

const Operation* System::find_operation(SymbolId id) const {
  for (const auto& op : operations)
    if (op.symbol == id) return &op;
  return nullptr;
}

const Operation& System::operation(SymbolId id) const {
  if (const auto* op = find_operation(id)) return *op;
  throw InternalError("no user operation with id " + std::to_string(id));
}

namespace {

enum class Tok { Ident, Int, LParen, RParen, Comma, Equals, Semi, Colon, Bar, Arrow, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::int64_t value = 0;
  std::size_t line = 1;
  std::size_t column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.line = line_;
      t.column = col_;
      if (pos_ >= src_.size()) {
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                                      src_[pos_] == '_' || src_[pos_] == '\''))
          advance();
        t.kind = Tok::Ident;
        t.text = std::string(src_.substr(start, pos_ - start));
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '-' && pos_ + 1 < src_.size() &&
                  std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        std::size_t start = pos_;
        advance();
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
        t.kind = Tok::Int;
        t.text = std::string(src_.substr(start, pos_ - start));
        auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.value);
        if (ec != std::errc()) throw SyntaxError(t.line, t.column, "integer literal out of range");
      } else if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
        advance();
        advance();
        t.kind = Tok::Arrow;
        t.text = "->";
      } else {
        advance();
        t.text = std::string(1, c);
        switch (c) {
          case '(': t.kind = Tok::LParen; break;
          case ')': t.kind = Tok::RParen; break;
          case ',': t.kind = Tok::Comma; break;
          case '=': t.kind = Tok::Equals; break;
          case ';': t.kind = Tok::Semi; break;
          case ':': t.kind = Tok::Colon; break;
          case '|': t.kind = Tok::Bar; break;
          default: throw SyntaxError(t.line, t.column, std::string("unexpected character '") + c + "'");
        }
      }
      out.push_back(std::move(t));
    }
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '-') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        return;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

// Unresolved syntax tree.
struct RawTerm {
  std::string name;  // empty for literals
  std::int64_t value = 0;
  bool has_parens = false;
  std::vector<RawTerm> args;
  std::size_t line = 0, column = 0;
};

struct RawRule {
  RawTerm lhs, rhs;
};

struct RawData {
  Token name;
  std::vector<std::pair<Token, std::vector<Token>>> ctors;
};

struct RawOp {
  Token name;
  std::vector<Token> arg_types;
  Token result;
  std::vector<RawRule> rules;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  void program(std::vector<RawData>& datas, std::vector<RawOp>& ops) {
    while (peek().kind != Tok::End) {
      const Token& t = peek();
      if (t.kind == Tok::Ident && t.text == "data") {
        datas.push_back(data());
      } else if (t.kind == Tok::Ident && t.text == "op") {
        ops.push_back(op());
      } else {
        fail(t, "expected 'data' or 'op' declaration");
      }
    }
  }

  RawTerm term() {
    const Token& t = peek();
    RawTerm out;
    out.line = t.line;
    out.column = t.column;
    if (t.kind == Tok::Int) {
      out.value = next().value;
      return out;
    }
    out.name = expect(Tok::Ident, "expected a term").text;
    if (peek().kind == Tok::LParen) {
      next();
      out.has_parens = true;
      if (peek().kind != Tok::RParen) {
        out.args.push_back(term());
        while (peek().kind == Tok::Comma) {
          next();
          out.args.push_back(term());
        }
      }
      expect(Tok::RParen, "expected ')'");
    }
    return out;
  }

  void expect_end() {
    if (peek().kind != Tok::End) fail(peek(), "unexpected trailing input");
  }

 private:
  RawData data() {
    next();  // data
    RawData d;
    d.name = expect(Tok::Ident, "expected type name");
    expect(Tok::Equals, "expected '='");
    do {
      Token c = expect(Tok::Ident, "expected constructor name");
      std::vector<Token> args;
      if (peek().kind == Tok::LParen) {
        next();
        if (peek().kind != Tok::RParen) {
          args.push_back(expect(Tok::Ident, "expected type name"));
          while (peek().kind == Tok::Comma) {
            next();
            args.push_back(expect(Tok::Ident, "expected type name"));
          }
        }
        expect(Tok::RParen, "expected ')'");
      }
      d.ctors.emplace_back(std::move(c), std::move(args));
    } while (peek().kind == Tok::Bar && (next(), true));
    expect(Tok::Semi, "expected ';' after data declaration");
    return d;
  }

  RawOp op() {
    next();  // op
    RawOp o;
    o.name = expect(Tok::Ident, "expected operation name");
    if (peek().kind == Tok::LParen) {
      next();
      if (peek().kind != Tok::RParen) {
        o.arg_types.push_back(expect(Tok::Ident, "expected type name"));
        while (peek().kind == Tok::Comma) {
          next();
          o.arg_types.push_back(expect(Tok::Ident, "expected type name"));
        }
      }
      expect(Tok::RParen, "expected ')'");
    }
    expect(Tok::Arrow, "expected '->'");
    o.result = expect(Tok::Ident, "expected result type");
    expect(Tok::Colon, "expected ':'");
    while (peek().kind != Tok::Semi) {
      RawRule r;
      r.lhs = term();
      expect(Tok::Equals, "expected '=' in rule");
      r.rhs = term();
      o.rules.push_back(std::move(r));
    }
    next();  // ;
    return o;
  }

  const Token& peek() const { return toks_[pos_]; }
  Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  Token expect(Tok k, const char* msg) {
    if (peek().kind != k) fail(peek(), msg);
    return next();
  }
  [[noreturn]] static void fail(const Token& t, const std::string& msg) {
    std::string got = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw SyntaxError(t.line, t.column, msg + ", got " + got);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

std::string where(const RawTerm& t) { return std::to_string(t.line) + ":" + std::to_string(t.column) + ": "; }

class Resolver {
 public:
  explicit Resolver(Signature& sig) : sig_(sig) {}

  TypeId type_named(const Token& t) {
    auto ty = sig_.find_type(t.text);
    if (!ty) throw ValidationError(std::to_string(t.line) + ":" + std::to_string(t.column) +
                                   ": unknown type '" + t.text + "'");
    return *ty;
  }

  // Pattern argument of a left-hand side.
  Term pattern(const RawTerm& raw, TypeId expected, SourceRule& rule,
               std::unordered_map<std::string, std::uint32_t>& vars) {
    if (raw.name.empty()) {
      if (expected != sig_.int_type()) throw ValidationError(where(raw) + "type error: literal where " + sig_.type(expected).name + " expected");
      return Term::literal(raw.value);
    }
    auto sym = sig_.find_symbol(raw.name);
    if (sym) {
      const auto& s = sig_.symbol(*sym);
      if (s.is_operation())
        throw ValidationError(where(raw) + "operation '" + raw.name + "' in pattern (constructor discipline)");
      check_arity(raw, s);
      if (s.result != expected)
        throw ValidationError(where(raw) + "type error: '" + raw.name + "' has type " + sig_.type(s.result).name +
                              ", expected " + sig_.type(expected).name);
      std::vector<Term> args;
      for (std::size_t i = 0; i < raw.args.size(); ++i) args.push_back(pattern(raw.args[i], s.arg_types[i], rule, vars));
      return Term::symbol(*sym, std::move(args));
    }
    if (raw.has_parens) throw ValidationError(where(raw) + "unknown symbol '" + raw.name + "'");
    if (raw.name != "_") {
      if (vars.contains(raw.name))
        throw ValidationError(where(raw) + "non-left-linear rule: variable '" + raw.name + "' repeated in left-hand side");
    }
    auto index = static_cast<std::uint32_t>(rule.var_names.size());
    rule.var_names.push_back(raw.name);
    rule.var_types.push_back(expected);
    if (raw.name != "_") vars.emplace(raw.name, index);
    return Term::var(index);
  }

  // Right-hand side or closed expression. `vars` null means no variables allowed.
  Term expression(const RawTerm& raw, std::optional<TypeId> expected, const SourceRule* rule,
                  const std::unordered_map<std::string, std::uint32_t>* vars, TypeId* got = nullptr) {
    TypeId ty;
    Term out;
    if (raw.name.empty()) {
      ty = sig_.int_type();
      out = Term::literal(raw.value);
    } else if (auto sym = sig_.find_symbol(raw.name)) {
      const auto& s = sig_.symbol(*sym);
      check_arity(raw, s);
      if (sig_.builtin_of(*sym)) {
        if (vars) sig_.set_active(*sym);
        else if (!sig_.is_active(*sym))
          throw ValidationError(where(raw) + "builtin '" + raw.name + "' is not used by the program");
      }
      std::vector<Term> args;
      for (std::size_t i = 0; i < raw.args.size(); ++i)
        args.push_back(expression(raw.args[i], s.arg_types[i], rule, vars));
      ty = s.result;
      out = Term::symbol(*sym, std::move(args));
    } else {
      if (raw.has_parens) throw ValidationError(where(raw) + "unknown symbol '" + raw.name + "'");
      if (!vars) throw ValidationError(where(raw) + "unbound variable '" + raw.name + "'");
      auto it = raw.name == "_" ? vars->end() : vars->find(raw.name);
      if (it == vars->end())
        throw ValidationError(where(raw) + "right-hand side variable '" + raw.name + "' does not occur in the left-hand side");
      ty = rule->var_types[it->second];
      out = Term::var(it->second);
    }
    if (expected && *expected != ty)
      throw ValidationError(where(raw) + "type error: expression has type " + sig_.type(ty).name + ", expected " +
                            sig_.type(*expected).name);
    if (got) *got = ty;
    return out;
  }

 private:
  void check_arity(const RawTerm& raw, const Symbol& s) {
    if (raw.args.size() != s.arity())
      throw ValidationError(where(raw) + "arity mismatch: '" + s.name + "' takes " + std::to_string(s.arity()) +
                            " argument(s), got " + std::to_string(raw.args.size()));
  }

  Signature& sig_;
};

}  // namespace

System parse_system(std::string_view text) {
  std::vector<RawData> datas;
  std::vector<RawOp> raw_ops;
  Parser(Lexer(text).run()).program(datas, raw_ops);

  System sys;
  Signature& sig = sys.sig;
  Resolver res(sig);
  std::vector<TypeId> data_ids;
  for (const auto& d : datas) data_ids.push_back(sig.add_type(d.name.text));
  for (std::size_t i = 0; i < datas.size(); ++i) {
    for (const auto& [name, args] : datas[i].ctors) {
      Symbol s{name.text, SymbolKind::Constructor, {}, data_ids[i]};
      for (const auto& a : args) s.arg_types.push_back(res.type_named(a));
      sig.add_symbol(std::move(s));
    }
  }
  std::vector<SymbolId> op_ids;
  for (const auto& o : raw_ops) {
    Symbol s{o.name.text, SymbolKind::Operation, {}, res.type_named(o.result)};
    for (const auto& a : o.arg_types) s.arg_types.push_back(res.type_named(a));
    op_ids.push_back(sig.add_symbol(std::move(s)));
  }
  for (TypeId t : data_ids)
    if (sig.type(t).constructors.empty())
      throw ValidationError("type '" + sig.type(t).name + "' has no constructors");

  for (std::size_t i = 0; i < raw_ops.size(); ++i) {
    const auto& raw = raw_ops[i];
    SymbolId id = op_ids[i];
    const Symbol& sym = sig.symbol(id);
    Operation op;
    op.symbol = id;
    if (raw.rules.empty()) throw ValidationError("operation '" + sym.name + "' has no rules");
    for (const auto& rr : raw.rules) {
      if (rr.lhs.name != sym.name)
        throw ValidationError(where(rr.lhs) + "rule head '" + (rr.lhs.name.empty() ? std::to_string(rr.lhs.value) : rr.lhs.name) +
                              "' does not match operation '" + sym.name + "'");
      if (rr.lhs.args.size() != sym.arity())
        throw ValidationError(where(rr.lhs) + "arity mismatch: '" + sym.name + "' takes " +
                              std::to_string(sym.arity()) + " argument(s), got " + std::to_string(rr.lhs.args.size()));
      SourceRule rule;
      rule.op = id;
      rule.index = op.rules.size();
      std::unordered_map<std::string, std::uint32_t> vars;
      std::vector<Term> args;
      for (std::size_t k = 0; k < rr.lhs.args.size(); ++k)
        args.push_back(res.pattern(rr.lhs.args[k], sym.arg_types[k], rule, vars));
      rule.lhs = Term::symbol(id, std::move(args));
      rule.rhs = res.expression(rr.rhs, sig.symbol(id).result, &rule, &vars);
      op.rules.push_back(std::move(rule));
    }
    sys.operations.push_back(std::move(op));
  }
  for (auto& op : sys.operations) op.tree = build_deftree(sig, op.symbol, op.rules);
  return sys;
}

ExprGraph parse_expr(std::string_view text, const System& sys) {
  Parser p(Lexer(text).run());
  RawTerm raw = p.term();
  p.expect_end();
  Signature& sig = const_cast<Signature&>(sys.sig);  // not mutated: vars == nullptr
  Resolver res(sig);
  return graph_from_term(res.expression(raw, std::nullopt, nullptr, nullptr));
}

std::string print_system(const System& sys) {
  const auto& sig = sys.sig;
  std::string out;
  for (TypeId t = 0; t < sig.type_count(); ++t) {
    const auto& d = sig.type(t);
    if (d.is_int) continue;
    out += "data " + d.name + " =";
    for (std::size_t i = 0; i < d.constructors.size(); ++i) {
      const auto& c = sig.symbol(d.constructors[i]);
      out += i ? " | " : " ";
      out += c.name;
      if (c.arity()) {
        out += '(';
        for (std::size_t k = 0; k < c.arity(); ++k) out += (k ? ", " : "") + sig.type(c.arg_types[k]).name;
        out += ')';
      }
    }
    out += ";\n";
  }
  for (const auto& op : sys.operations) {
    const auto& s = sig.symbol(op.symbol);
    out += "\nop " + s.name + "(";
    for (std::size_t k = 0; k < s.arity(); ++k) out += (k ? ", " : "") + sig.type(s.arg_types[k]).name;
    out += ") -> " + sig.type(s.result).name + ":\n";
    for (const auto& r : op.rules) out += "  " + print_rule(r.lhs, r.rhs, sig, r.var_names) + "\n";
    out += ";\n";
  }
  return out;
}

std::string render_tree(const System& sys, const Operation& op) {
  return render_deftree(op.tree.root, sys.sig, deftree_var_names(op.tree), op.rules);
}

}  // namespace needle
