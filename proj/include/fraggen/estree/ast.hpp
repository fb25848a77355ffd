#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fraggen/estree/box.hpp"

namespace fraggen::estree {

// The supported ECMAScript subset. Order is part of the on-disk format
// (canonical keys and checkpoints store the numeric id); append only.
enum class NodeKind : std::uint8_t {
  Program,
  EmptyStatement,
  ExpressionStatement,
  BlockStatement,
  VariableDeclaration,
  VariableDeclarator,
  FunctionDeclaration,
  FunctionExpression,
  ArrowFunctionExpression,
  ClassDeclaration,
  ClassExpression,
  ClassBody,
  MethodDefinition,
  ReturnStatement,
  IfStatement,
  ForStatement,
  ForInStatement,
  ForOfStatement,
  WhileStatement,
  DoWhileStatement,
  SwitchStatement,
  SwitchCase,
  BreakStatement,
  ContinueStatement,
  LabeledStatement,
  TryStatement,
  CatchClause,
  ThrowStatement,
  Identifier,
  Literal,
  ArrayExpression,
  ObjectExpression,
  Property,
  MemberExpression,
  CallExpression,
  NewExpression,
  AssignmentExpression,
  BinaryExpression,
  LogicalExpression,
  UnaryExpression,
  UpdateExpression,
  ConditionalExpression,
  SequenceExpression,
  SpreadElement,
  TemplateLiteral,
  TemplateElement,
  TaggedTemplateExpression,
  ObjectPattern,
  ArrayPattern,
  AssignmentPattern,
  RestElement,
  Super,
  ThisExpression,
  YieldExpression,
  AwaitExpression,
  DebuggerStatement,
  MetaProperty,
};

inline constexpr std::size_t kNodeKindCount = 57;

enum class Arity : std::uint8_t { One, Optional, List, Value };

struct SlotSpec {
  std::string_view name;  // ESTree key; dotted for nested objects ("value.raw")
  Arity arity;
};

struct KindSpec {
  NodeKind kind;
  std::string_view name;
  std::span<const SlotSpec> slots;
};

const KindSpec& spec(NodeKind kind);
std::string_view kind_name(NodeKind kind);
std::optional<NodeKind> kind_from_name(std::string_view name);
// Index of `slot` in the kind's schema, or nullopt.
std::optional<std::size_t> slot_index(NodeKind kind, std::string_view slot);

struct Regex {
  std::string pattern;
  std::string flags;
  friend auto operator<=>(const Regex&, const Regex&) = default;
};

using Scalar = std::variant<std::nullptr_t, bool, double, std::string, Regex>;

struct Absent {
  friend bool operator==(Absent, Absent) { return true; }
};

class AstNode;
using NodeList = std::vector<Box<AstNode>>;  // a null Box is an array hole
using Slot = std::variant<Absent, Box<AstNode>, NodeList, Scalar>;

// A node of the supported subset. Slots follow the kind's schema order. A
// stub is a kind-only placeholder (no slots) awaiting expansion; finished
// trees contain none.
class AstNode {
 public:
  explicit AstNode(NodeKind kind);
  static AstNode make_stub(NodeKind kind);

  NodeKind kind() const { return kind_; }
  bool is_stub() const { return stub_; }

  std::span<Slot> slots() { return slots_; }
  std::span<const Slot> slots() const { return slots_; }

  Slot& slot(std::string_view name);
  const Slot& slot(std::string_view name) const;

  // Typed accessors; return null when the slot holds something else.
  AstNode* child(std::string_view name);
  const AstNode* child(std::string_view name) const;
  NodeList* list(std::string_view name);
  const NodeList* list(std::string_view name) const;
  const Scalar* value(std::string_view name) const;
  const std::string* string_value(std::string_view name) const;
  bool flag(std::string_view name) const;  // false unless a `true` boolean

  void set(std::string_view name, Slot value);

  friend bool operator==(const AstNode&, const AstNode&) = default;

 private:
  AstNode(NodeKind kind, bool stub);

  NodeKind kind_;
  bool stub_ = false;
  std::vector<Slot> slots_;
};

// True when any node in the tree is a stub.
bool has_stub(const AstNode& root);
std::size_t count_nodes(const AstNode& root);
std::size_t count_stubs(const AstNode& root);

constexpr std::size_t index_of(NodeKind kind) { return static_cast<std::size_t>(kind); }

}  // namespace fraggen::estree
