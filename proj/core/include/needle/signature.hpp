#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "needle/label.hpp"
#include "needle/term.hpp"

namespace needle {

enum class SymbolKind { Constructor, Operation, Builtin };

struct Symbol {
  std::string name;
  SymbolKind kind = SymbolKind::Constructor;
  std::vector<TypeId> arg_types;
  TypeId result = kNoType;

  std::size_t arity() const { return arg_types.size(); }
  bool is_constructor() const { return kind == SymbolKind::Constructor; }
  bool is_operation() const { return kind != SymbolKind::Constructor; }
};

struct DataType {
  std::string name;
  std::vector<SymbolId> constructors;
  bool is_int = false;
};

/// A rule `lhs = rhs` of the source system. Variables are numbered densely;
/// `var_names[i]` and `var_types[i]` describe variable `i`.
struct SourceRule {
  SymbolId op = 0;
  std::size_t index = 0;  // position among the rules of `op`
  Term lhs;
  Term rhs;
  std::vector<std::string> var_names;
  std::vector<TypeId> var_types;
};

enum class Builtin { Add, Sub };

/// Types and symbols of a rewrite system. `Int` and the builtins `add`/`sub`
/// are always declared; a builtin is *active* only when the program uses it.
class Signature {
 public:
  Signature();

  TypeId add_type(std::string name);
  SymbolId add_symbol(Symbol s);
  void set_active(SymbolId builtin);

  const DataType& type(TypeId id) const { return types_.at(id); }
  DataType& type(TypeId id) { return types_.at(id); }
  const Symbol& symbol(SymbolId id) const { return symbols_.at(id); }
  std::size_t type_count() const { return types_.size(); }
  std::size_t symbol_count() const { return symbols_.size(); }

  std::optional<TypeId> find_type(std::string_view name) const;
  std::optional<SymbolId> find_symbol(std::string_view name) const;

  TypeId int_type() const { return int_type_; }
  SymbolId builtin_symbol(Builtin b) const { return b == Builtin::Add ? add_ : sub_; }
  std::optional<Builtin> builtin_of(SymbolId id) const;
  bool is_active(SymbolId id) const;

  /// Operations (user-defined, then active builtins) whose result is `sort`,
  /// in declaration order.
  std::vector<SymbolId> operations_of_sort(TypeId sort) const;
  /// User operations in declaration order followed by active builtins.
  std::vector<SymbolId> operations() const;
  /// True iff `Int` occurs in the signature of a constructor or active operation.
  bool uses_int() const;

  /// Type of the position `p` inside pattern `t` whose root is a symbol.
  TypeId type_at(const Term& t, const Path& p) const;

 private:
  std::vector<DataType> types_;
  std::vector<Symbol> symbols_;
  std::vector<bool> active_;
  std::unordered_map<std::string, TypeId> type_index_;
  std::unordered_map<std::string, SymbolId> symbol_index_;
  TypeId int_type_ = 0;
  SymbolId add_ = 0;
  SymbolId sub_ = 0;
};

}  // namespace needle
