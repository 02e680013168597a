#include "needle/signature.hpp"

#include "needle/error.hpp"

namespace needle {

Signature::Signature() {
  int_type_ = add_type("Int");
  types_[int_type_].is_int = true;
  add_ = add_symbol({"add", SymbolKind::Builtin, {int_type_, int_type_}, int_type_});
  sub_ = add_symbol({"sub", SymbolKind::Builtin, {int_type_, int_type_}, int_type_});
  active_[add_] = false;
  active_[sub_] = false;
}

TypeId Signature::add_type(std::string name) {
  if (type_index_.contains(name)) throw ValidationError("duplicate type '" + name + "'");
  auto id = static_cast<TypeId>(types_.size());
  type_index_.emplace(name, id);
  types_.push_back({std::move(name), {}, false});
  return id;
}

SymbolId Signature::add_symbol(Symbol s) {
  if (symbol_index_.contains(s.name)) throw ValidationError("duplicate symbol '" + s.name + "'");
  auto id = static_cast<SymbolId>(symbols_.size());
  symbol_index_.emplace(s.name, id);
  if (s.is_constructor()) types_.at(s.result).constructors.push_back(id);
  symbols_.push_back(std::move(s));
  active_.push_back(true);
  return id;
}

void Signature::set_active(SymbolId builtin) { active_.at(builtin) = true; }

std::optional<TypeId> Signature::find_type(std::string_view name) const {
  auto it = type_index_.find(std::string(name));
  if (it == type_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<SymbolId> Signature::find_symbol(std::string_view name) const {
  auto it = symbol_index_.find(std::string(name));
  if (it == symbol_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<Builtin> Signature::builtin_of(SymbolId id) const {
  if (id == add_) return Builtin::Add;
  if (id == sub_) return Builtin::Sub;
  return std::nullopt;
}

bool Signature::is_active(SymbolId id) const { return active_.at(id); }

std::vector<SymbolId> Signature::operations() const {
  std::vector<SymbolId> out;
  for (SymbolId id = 0; id < symbols_.size(); ++id)
    if (symbols_[id].kind == SymbolKind::Operation) out.push_back(id);
  for (SymbolId id : {add_, sub_})
    if (active_[id]) out.push_back(id);
  return out;
}

std::vector<SymbolId> Signature::operations_of_sort(TypeId sort) const {
  std::vector<SymbolId> out;
  for (SymbolId id : operations())
    if (symbols_[id].result == sort) out.push_back(id);
  return out;
}

bool Signature::uses_int() const {
  for (SymbolId id = 0; id < symbols_.size(); ++id) {
    if (!active_[id]) continue;
    const auto& s = symbols_[id];
    if (s.result == int_type_) return true;
    for (auto t : s.arg_types)
      if (t == int_type_) return true;
  }
  return false;
}

TypeId Signature::type_at(const Term& t, const Path& p) const {
  if (p.empty()) {
    if (t.label.is_symbol()) return symbols_.at(t.label.symbol_id()).result;
    throw InternalError("type_at: root is not a symbol");
  }
  const Term* cur = &t;
  TypeId ty = kNoType;
  for (auto i : p) {
    switch (cur->label.kind) {
      case LabelKind::Symbol:
      case LabelKind::Special:
        ty = symbols_.at(cur->label.symbol_id()).arg_types.at(i);
        break;
      case LabelKind::Head:
      case LabelKind::Norm: {
        const Term& inner = cur->args.at(0);
        ty = inner.label.is_symbol() ? symbols_.at(inner.label.symbol_id()).result : kNoType;
        break;
      }
      default:
        throw InternalError("type_at: path runs through a leaf");
    }
    cur = &cur->args.at(i);
  }
  return ty;
}

}  // namespace needle
