#include "fraggen/estree/ast.hpp"

#include <array>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace fraggen::estree {
namespace {

using enum Arity;

constexpr SlotSpec kNone[] = {{"", Value}};  // placeholder, never exposed

constexpr SlotSpec kProgram[] = {{"body", List}, {"sourceType", Value}};
constexpr SlotSpec kExpressionStatement[] = {{"expression", One}, {"directive", Value}};
constexpr SlotSpec kBlockStatement[] = {{"body", List}};
constexpr SlotSpec kVariableDeclaration[] = {{"declarations", List}, {"kind", Value}};
constexpr SlotSpec kVariableDeclarator[] = {{"id", One}, {"init", Optional}};
constexpr SlotSpec kFunction[] = {{"id", Optional},
                                  {"params", List},
                                  {"body", One},
                                  {"generator", Value},
                                  {"async", Value}};
constexpr SlotSpec kArrow[] = {{"id", Optional},      {"params", List},
                               {"body", One},         {"expression", Value},
                               {"generator", Value},  {"async", Value}};
constexpr SlotSpec kClass[] = {{"id", Optional}, {"superClass", Optional}, {"body", One}};
constexpr SlotSpec kClassBody[] = {{"body", List}};
constexpr SlotSpec kMethodDefinition[] = {{"key", One},
                                          {"value", One},
                                          {"kind", Value},
                                          {"computed", Value},
                                          {"static", Value}};
constexpr SlotSpec kArgumentOpt[] = {{"argument", Optional}};
constexpr SlotSpec kArgument[] = {{"argument", One}};
constexpr SlotSpec kIfStatement[] = {{"test", One}, {"consequent", One}, {"alternate", Optional}};
constexpr SlotSpec kForStatement[] = {
    {"init", Optional}, {"test", Optional}, {"update", Optional}, {"body", One}};
constexpr SlotSpec kForInStatement[] = {{"left", One}, {"right", One}, {"body", One}};
constexpr SlotSpec kForOfStatement[] = {
    {"left", One}, {"right", One}, {"body", One}, {"await", Value}};
constexpr SlotSpec kWhileStatement[] = {{"test", One}, {"body", One}};
constexpr SlotSpec kDoWhileStatement[] = {{"body", One}, {"test", One}};
constexpr SlotSpec kSwitchStatement[] = {{"discriminant", One}, {"cases", List}};
constexpr SlotSpec kSwitchCase[] = {{"test", Optional}, {"consequent", List}};
constexpr SlotSpec kLabelOpt[] = {{"label", Optional}};
constexpr SlotSpec kLabeledStatement[] = {{"label", One}, {"body", One}};
constexpr SlotSpec kTryStatement[] = {
    {"block", One}, {"handler", Optional}, {"finalizer", Optional}};
constexpr SlotSpec kCatchClause[] = {{"param", Optional}, {"body", One}};
constexpr SlotSpec kIdentifier[] = {{"name", Value}};
constexpr SlotSpec kLiteral[] = {{"value", Value}, {"raw", Value}};
constexpr SlotSpec kElements[] = {{"elements", List}};
constexpr SlotSpec kProperties[] = {{"properties", List}};
constexpr SlotSpec kProperty[] = {{"key", One},          {"value", One},
                                  {"kind", Value},       {"computed", Value},
                                  {"method", Value},     {"shorthand", Value}};
constexpr SlotSpec kMemberExpression[] = {
    {"object", One}, {"property", One}, {"computed", Value}};
constexpr SlotSpec kCall[] = {{"callee", One}, {"arguments", List}};
constexpr SlotSpec kOperatorBinary[] = {{"operator", Value}, {"left", One}, {"right", One}};
constexpr SlotSpec kUnary[] = {{"operator", Value}, {"prefix", Value}, {"argument", One}};
constexpr SlotSpec kConditional[] = {{"test", One}, {"consequent", One}, {"alternate", One}};
constexpr SlotSpec kSequence[] = {{"expressions", List}};
constexpr SlotSpec kTemplateLiteral[] = {{"quasis", List}, {"expressions", List}};
constexpr SlotSpec kTemplateElement[] = {
    {"value.raw", Value}, {"value.cooked", Value}, {"tail", Value}};
constexpr SlotSpec kTaggedTemplate[] = {{"tag", One}, {"quasi", One}};
constexpr SlotSpec kAssignmentPattern[] = {{"left", One}, {"right", One}};
constexpr SlotSpec kYield[] = {{"argument", Optional}, {"delegate", Value}};
constexpr SlotSpec kMetaProperty[] = {{"meta", One}, {"property", One}};

template <std::size_t N>
constexpr std::span<const SlotSpec> S(const SlotSpec (&a)[N]) {
  return std::span<const SlotSpec>(a, N);
}
constexpr std::span<const SlotSpec> kEmpty = std::span<const SlotSpec>(kNone, 0);

using K = NodeKind;
constexpr std::array<KindSpec, kNodeKindCount> kRegistry = {{
    {K::Program, "Program", S(kProgram)},
    {K::EmptyStatement, "EmptyStatement", kEmpty},
    {K::ExpressionStatement, "ExpressionStatement", S(kExpressionStatement)},
    {K::BlockStatement, "BlockStatement", S(kBlockStatement)},
    {K::VariableDeclaration, "VariableDeclaration", S(kVariableDeclaration)},
    {K::VariableDeclarator, "VariableDeclarator", S(kVariableDeclarator)},
    {K::FunctionDeclaration, "FunctionDeclaration", S(kFunction)},
    {K::FunctionExpression, "FunctionExpression", S(kFunction)},
    {K::ArrowFunctionExpression, "ArrowFunctionExpression", S(kArrow)},
    {K::ClassDeclaration, "ClassDeclaration", S(kClass)},
    {K::ClassExpression, "ClassExpression", S(kClass)},
    {K::ClassBody, "ClassBody", S(kClassBody)},
    {K::MethodDefinition, "MethodDefinition", S(kMethodDefinition)},
    {K::ReturnStatement, "ReturnStatement", S(kArgumentOpt)},
    {K::IfStatement, "IfStatement", S(kIfStatement)},
    {K::ForStatement, "ForStatement", S(kForStatement)},
    {K::ForInStatement, "ForInStatement", S(kForInStatement)},
    {K::ForOfStatement, "ForOfStatement", S(kForOfStatement)},
    {K::WhileStatement, "WhileStatement", S(kWhileStatement)},
    {K::DoWhileStatement, "DoWhileStatement", S(kDoWhileStatement)},
    {K::SwitchStatement, "SwitchStatement", S(kSwitchStatement)},
    {K::SwitchCase, "SwitchCase", S(kSwitchCase)},
    {K::BreakStatement, "BreakStatement", S(kLabelOpt)},
    {K::ContinueStatement, "ContinueStatement", S(kLabelOpt)},
    {K::LabeledStatement, "LabeledStatement", S(kLabeledStatement)},
    {K::TryStatement, "TryStatement", S(kTryStatement)},
    {K::CatchClause, "CatchClause", S(kCatchClause)},
    {K::ThrowStatement, "ThrowStatement", S(kArgument)},
    {K::Identifier, "Identifier", S(kIdentifier)},
    {K::Literal, "Literal", S(kLiteral)},
    {K::ArrayExpression, "ArrayExpression", S(kElements)},
    {K::ObjectExpression, "ObjectExpression", S(kProperties)},
    {K::Property, "Property", S(kProperty)},
    {K::MemberExpression, "MemberExpression", S(kMemberExpression)},
    {K::CallExpression, "CallExpression", S(kCall)},
    {K::NewExpression, "NewExpression", S(kCall)},
    {K::AssignmentExpression, "AssignmentExpression", S(kOperatorBinary)},
    {K::BinaryExpression, "BinaryExpression", S(kOperatorBinary)},
    {K::LogicalExpression, "LogicalExpression", S(kOperatorBinary)},
    {K::UnaryExpression, "UnaryExpression", S(kUnary)},
    {K::UpdateExpression, "UpdateExpression", S(kUnary)},
    {K::ConditionalExpression, "ConditionalExpression", S(kConditional)},
    {K::SequenceExpression, "SequenceExpression", S(kSequence)},
    {K::SpreadElement, "SpreadElement", S(kArgument)},
    {K::TemplateLiteral, "TemplateLiteral", S(kTemplateLiteral)},
    {K::TemplateElement, "TemplateElement", S(kTemplateElement)},
    {K::TaggedTemplateExpression, "TaggedTemplateExpression", S(kTaggedTemplate)},
    {K::ObjectPattern, "ObjectPattern", S(kProperties)},
    {K::ArrayPattern, "ArrayPattern", S(kElements)},
    {K::AssignmentPattern, "AssignmentPattern", S(kAssignmentPattern)},
    {K::RestElement, "RestElement", S(kArgument)},
    {K::Super, "Super", kEmpty},
    {K::ThisExpression, "ThisExpression", kEmpty},
    {K::YieldExpression, "YieldExpression", S(kYield)},
    {K::AwaitExpression, "AwaitExpression", S(kArgument)},
    {K::DebuggerStatement, "DebuggerStatement", kEmpty},
    {K::MetaProperty, "MetaProperty", S(kMetaProperty)},
}};

constexpr bool registry_is_ordered() {
  for (std::size_t i = 0; i < kRegistry.size(); ++i) {
    if (static_cast<std::size_t>(kRegistry[i].kind) != i) return false;
  }
  return true;
}
static_assert(registry_is_ordered(), "registry order must match NodeKind");

const std::unordered_map<std::string_view, NodeKind>& name_index() {
  static const auto* index = [] {
    auto* m = new std::unordered_map<std::string_view, NodeKind>();
    for (const auto& k : kRegistry) m->emplace(k.name, k.kind);
    return m;
  }();
  return *index;
}

std::size_t require_slot(NodeKind kind, std::string_view name) {
  auto idx = slot_index(kind, name);
  if (!idx) {
    throw std::out_of_range(std::string(kind_name(kind)) + " has no slot '" +
                            std::string(name) + "'");
  }
  return *idx;
}

}  // namespace

const KindSpec& spec(NodeKind kind) { return kRegistry[index_of(kind)]; }

std::string_view kind_name(NodeKind kind) { return kRegistry[index_of(kind)].name; }

std::optional<NodeKind> kind_from_name(std::string_view name) {
  const auto& index = name_index();
  auto it = index.find(name);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> slot_index(NodeKind kind, std::string_view slot) {
  const auto slots = spec(kind).slots;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].name == slot) return i;
  }
  return std::nullopt;
}

AstNode::AstNode(NodeKind kind) : AstNode(kind, false) {}

AstNode::AstNode(NodeKind kind, bool stub) : kind_(kind), stub_(stub) {
  if (stub_) return;
  for (const auto& s : spec(kind).slots) {
    if (s.arity == Arity::List) {
      slots_.emplace_back(NodeList{});
    } else {
      slots_.emplace_back(Absent{});
    }
  }
}

AstNode AstNode::make_stub(NodeKind kind) { return AstNode(kind, true); }

Slot& AstNode::slot(std::string_view name) { return slots_.at(require_slot(kind_, name)); }

const Slot& AstNode::slot(std::string_view name) const {
  return slots_.at(require_slot(kind_, name));
}

AstNode* AstNode::child(std::string_view name) {
  if (stub_) return nullptr;
  auto* box = std::get_if<Box<AstNode>>(&slot(name));
  return box ? box->get() : nullptr;
}

const AstNode* AstNode::child(std::string_view name) const {
  if (stub_) return nullptr;
  const auto* box = std::get_if<Box<AstNode>>(&slot(name));
  return box ? box->get() : nullptr;
}

NodeList* AstNode::list(std::string_view name) {
  if (stub_) return nullptr;
  return std::get_if<NodeList>(&slot(name));
}

const NodeList* AstNode::list(std::string_view name) const {
  if (stub_) return nullptr;
  return std::get_if<NodeList>(&slot(name));
}

const Scalar* AstNode::value(std::string_view name) const {
  if (stub_) return nullptr;
  return std::get_if<Scalar>(&slot(name));
}

const std::string* AstNode::string_value(std::string_view name) const {
  const auto* v = value(name);
  return v ? std::get_if<std::string>(v) : nullptr;
}

bool AstNode::flag(std::string_view name) const {
  const auto* v = value(name);
  if (!v) return false;
  const auto* b = std::get_if<bool>(v);
  return b && *b;
}

void AstNode::set(std::string_view name, Slot value) { slot(name) = std::move(value); }

namespace {

template <typename Fn>
void for_each_node(const AstNode& node, Fn&& fn) {
  fn(node);
  for (const auto& s : node.slots()) {
    if (const auto* box = std::get_if<Box<AstNode>>(&s)) {
      if (*box) for_each_node(**box, fn);
    } else if (const auto* list = std::get_if<NodeList>(&s)) {
      for (const auto& item : *list) {
        if (item) for_each_node(*item, fn);
      }
    }
  }
}

}  // namespace

bool has_stub(const AstNode& root) { return count_stubs(root) > 0; }

std::size_t count_nodes(const AstNode& root) {
  std::size_t n = 0;
  for_each_node(root, [&](const AstNode&) { ++n; });
  return n;
}

std::size_t count_stubs(const AstNode& root) {
  std::size_t n = 0;
  for_each_node(root, [&](const AstNode& node) { n += node.is_stub() ? 1 : 0; });
  return n;
}

}  // namespace fraggen::estree
