#pragma once

#include <cstdint>
#include <functional>

namespace needle {

using SymbolId = std::uint32_t;
using TypeId = std::uint32_t;

inline constexpr TypeId kNoType = static_cast<TypeId>(-1);

/// What a node (or pattern position) is labeled by.
///
/// `Symbol` covers constructors, operations and builtins of the source
/// system. `Head` and `Norm` are the two control operations of the object
/// code, `Special` is a fused head-of-operation symbol (value = operation
/// id). `Var` and `LitVar` only occur in rule sides; a `LitVar` matches
/// integer literal nodes and nothing else.
enum class LabelKind : std::uint8_t {
  Symbol,
  Literal,
  Head,
  Norm,
  Special,
  Var,
  LitVar,
};

struct Label {
  LabelKind kind = LabelKind::Symbol;
  std::int64_t value = 0;

  static constexpr Label symbol(SymbolId id) { return {LabelKind::Symbol, id}; }
  static constexpr Label literal(std::int64_t v) { return {LabelKind::Literal, v}; }
  static constexpr Label head() { return {LabelKind::Head, 0}; }
  static constexpr Label norm() { return {LabelKind::Norm, 0}; }
  static constexpr Label special(SymbolId op) { return {LabelKind::Special, op}; }
  static constexpr Label var(std::uint32_t index) { return {LabelKind::Var, index}; }
  static constexpr Label lit_var(std::uint32_t index) { return {LabelKind::LitVar, index}; }

  constexpr bool is_symbol() const { return kind == LabelKind::Symbol; }
  constexpr bool is_literal() const { return kind == LabelKind::Literal; }
  constexpr bool is_variable() const {
    return kind == LabelKind::Var || kind == LabelKind::LitVar;
  }
  /// H, N and f^H: the labels the object code rewrites.
  constexpr bool is_control() const {
    return kind == LabelKind::Head || kind == LabelKind::Norm || kind == LabelKind::Special;
  }
  constexpr SymbolId symbol_id() const { return static_cast<SymbolId>(value); }
  constexpr std::uint32_t var_index() const { return static_cast<std::uint32_t>(value); }

  friend constexpr bool operator==(const Label&, const Label&) = default;
};

struct LabelHash {
  std::size_t operator()(const Label& l) const noexcept {
    return std::hash<std::int64_t>{}(l.value) * 31u + static_cast<std::size_t>(l.kind);
  }
};

}  // namespace needle
