#include "fraggen/resolver/resolver.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "fraggen/errors.hpp"
#include "fraggen/estree/builders.hpp"
#include "fraggen/estree/traversal.hpp"

namespace fraggen::resolver {

using estree::AstNode;
using estree::BindingKind;
using estree::NodeKind;
using estree::ScopeKind;

namespace {

JsType initial_type(BindingKind kind) {
  switch (kind) {
    case BindingKind::Function:
    case BindingKind::FunctionName:
    case BindingKind::Class:
      return JsType::Function;
    default:
      return JsType::Undefined;
  }
}

template <typename Node>
class ScopeBuilder : public estree::BasicBindingVisitor<Node> {
 public:
  explicit ScopeBuilder(ScopeTree& tree) : tree_(tree) {}

  void enter_scope(Node& owner, ScopeKind kind) override {
    Scope s;
    s.owner = &owner;
    s.kind = kind;
    s.parent = stack_.empty() ? -1 : stack_.back();
    if (kind == ScopeKind::Function && owner.kind() != NodeKind::ArrowFunctionExpression) {
      s.bindings.emplace("arguments", Binding{BindingKind::Var, JsType::Object, Origin::Implicit});
    }
    const int index = static_cast<int>(tree_.scopes.size());
    tree_.scopes.push_back(std::move(s));
    tree_.by_owner.emplace(&owner, index);
    stack_.push_back(index);
  }
  void exit_scope(Node&, ScopeKind) override { stack_.pop_back(); }
  void declare(Node& id, BindingKind kind, Node& scope) override {
    const auto* name = id.string_value("name");
    if (!name) return;
    auto& bindings = tree_.scopes[static_cast<std::size_t>(tree_.index_of(&scope))].bindings;
    auto it = bindings.find(*name);
    if (it == bindings.end() || it->second.origin == Origin::Implicit) {
      bindings.insert_or_assign(*name, Binding{kind, initial_type(kind), Origin::Declared});
    }
  }

 private:
  ScopeTree& tree_;
  std::vector<int> stack_;
};

bool arithmetic_operator(std::string_view op) {
  static const std::set<std::string_view> ops = {"-", "*", "/", "%", "**", "<<", ">>", ">>>",
                                                 "&", "|", "^", "-=", "*=", "/=", "%=", "**=",
                                                 "<<=", ">>=", ">>>=", "&=", "|=", "^="};
  return ops.count(op) > 0;
}

// Walks references with the scope stack and running binding types.
class Rewriter : public estree::BindingVisitor {
 public:
  Rewriter(ScopeTree& tree, const UsageHints* hints, Rng* rng, std::set<std::string> used)
      : tree_(tree), hints_(hints), rng_(rng), used_(std::move(used)) {}

  void enter_scope(AstNode& owner, ScopeKind) override { stack_.push_back(tree_.index_of(&owner)); }
  void exit_scope(AstNode&, ScopeKind) override { stack_.pop_back(); }

  void assigned(AstNode& id, AstNode& value) override {
    const auto* name = id.string_value("name");
    if (!name) return;
    if (auto* b = find(*name)) {
      if (b->origin == Origin::Declared) b->type = infer_static_type(value);
    }
  }

  void reference(AstNode& id, AstNode* parent, std::string_view slot) override {
    const auto* name = id.string_value("name");
    if (!name || find(*name)) return;
    undeclared.push_back(*name);
    if (!rng_) return;
    const JsType want = hints_->infer(parent, slot);
    const std::string to = pick(want);
    report.replacements.push_back({*name, to, want});
    id.set("name", estree::Scalar(to));
  }

  std::vector<std::string> undeclared;
  ResolveReport report;
  std::vector<std::pair<std::string, JsType>> fresh;

 private:
  Binding* find(std::string_view name) {
    for (int at = stack_.back(); at >= 0; at = tree_.scopes[static_cast<std::size_t>(at)].parent) {
      auto& b = tree_.scopes[static_cast<std::size_t>(at)].bindings;
      auto it = b.find(name);
      if (it != b.end()) return &it->second;
    }
    return nullptr;
  }

  std::string pick(JsType want) {
    // Visible declared names, inner scopes shadowing outer ones.
    std::map<std::string, JsType> visible;
    for (int at = stack_.back(); at >= 0; at = tree_.scopes[static_cast<std::size_t>(at)].parent) {
      for (const auto& [name, b] : tree_.scopes[static_cast<std::size_t>(at)].bindings) {
        if (b.origin == Origin::Declared) visible.emplace(name, b.type);
      }
    }
    std::vector<std::string> typed;
    std::vector<std::string> any;
    for (const auto& [name, type] : visible) {
      any.push_back(name);
      if (want != JsType::Unknown && type == want) typed.push_back(name);
    }
    const auto& pool = typed.empty() ? any : typed;
    if (!pool.empty()) {
      std::uniform_int_distribution<std::size_t> d(0, pool.size() - 1);
      return pool[d(*rng_)];
    }
    std::string name;
    for (std::size_t n = 0;; ++n) {
      name = "v" + std::to_string(n);
      if (!used_.count(name)) break;
    }
    used_.insert(name);
    tree_.scopes[0].bindings.emplace(name, Binding{BindingKind::Var, want, Origin::Declared});
    fresh.emplace_back(name, want);
    report.fresh.push_back(name);
    return name;
  }

  ScopeTree& tree_;
  const UsageHints* hints_;
  Rng* rng_;
  std::set<std::string> used_;
  std::vector<int> stack_;
};

AstNode default_value(JsType type) {
  namespace b = estree::build;
  switch (type) {
    case JsType::Array: return b::array({});
    case JsType::Boolean: return b::boolean(false);
    case JsType::Function: return b::function_expression({});
    case JsType::Null: return b::null_literal();
    case JsType::Object: return b::object();
    case JsType::Regex: return b::regex("a", "");
    case JsType::String: return b::string("");
    case JsType::Undefined: return b::identifier("undefined");
    case JsType::Number:
    case JsType::Unknown: return b::number(0);
  }
  return b::number(0);
}

std::set<std::string> identifier_names(const AstNode& ast) {
  std::set<std::string> out;
  for (const auto* n : estree::preorder(ast)) {
    if (n->kind() == NodeKind::Identifier) {
      if (const auto* name = n->string_value("name")) out.insert(*name);
    }
  }
  return out;
}

}  // namespace

int ScopeTree::index_of(const AstNode* owner) const {
  auto it = by_owner.find(owner);
  if (it == by_owner.end()) throw Error("node does not own a scope");
  return it->second;
}

const Binding* ScopeTree::lookup(int at, std::string_view name) const {
  for (; at >= 0; at = scopes[static_cast<std::size_t>(at)].parent) {
    const auto& b = scopes[static_cast<std::size_t>(at)].bindings;
    auto it = b.find(name);
    if (it != b.end()) return &it->second;
  }
  return nullptr;
}

ScopeTree build_scopes(const AstNode& ast, const normalizer::BuiltinRegistry& builtins) {
  ScopeTree tree;
  ScopeBuilder<const AstNode> builder(tree);
  estree::visit_bindings(ast, builder);
  auto& root = tree.scopes.at(0).bindings;
  for (const auto& name : builtins.names()) {
    if (root.count(name)) continue;
    root.emplace(name, Binding{BindingKind::Var, builtins.type_of(name).value_or(JsType::Unknown),
                               Origin::Builtin});
  }
  for (const auto& name : builtins.test_functions()) {
    if (root.count(name)) continue;
    root.emplace(name, Binding{BindingKind::Var, JsType::Function, Origin::Builtin});
  }
  return tree;
}

JsType infer_static_type(const AstNode& expr) {
  switch (expr.kind()) {
    case NodeKind::ArrayExpression: return JsType::Array;
    case NodeKind::ObjectExpression: return JsType::Object;
    case NodeKind::FunctionExpression:
    case NodeKind::ArrowFunctionExpression:
    case NodeKind::ClassExpression: return JsType::Function;
    case NodeKind::Identifier: {
      const auto* name = expr.string_value("name");
      return name && *name == "undefined" ? JsType::Undefined : JsType::Unknown;
    }
    case NodeKind::Literal: {
      const auto* v = expr.value("value");
      if (!v) return JsType::Unknown;
      if (std::holds_alternative<bool>(*v)) return JsType::Boolean;
      if (std::holds_alternative<double>(*v)) return JsType::Number;
      if (std::holds_alternative<std::string>(*v)) return JsType::String;
      if (std::holds_alternative<estree::Regex>(*v)) return JsType::Regex;
      return JsType::Null;
    }
    default:
      return JsType::Unknown;
  }
}

UsageHints UsageHints::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("usage hints must be a JSON object");
  UsageHints h;
  for (const auto& [key, value] : doc.items()) {
    if (!value.is_string()) throw ConfigError("usage hint " + key + " must name a type");
    auto type = parse_js_type(value.get<std::string>());
    if (!type) throw ConfigError("unknown type in usage hint " + key);
    h.table_.emplace(key, *type);
  }
  return h;
}

UsageHints UsageHints::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read " + file.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed usage hints " + file.string() + ": " + e.what());
  }
}

UsageHints UsageHints::defaults() {
  return load(normalizer::BuiltinRegistry::default_data_dir() / "usage_hints.json");
}

JsType UsageHints::lookup(const std::string& key) const {
  auto it = table_.find(key);
  return it == table_.end() ? JsType::Unknown : it->second;
}

JsType UsageHints::infer(const AstNode* parent, std::string_view slot) const {
  if (!parent) return JsType::Unknown;
  switch (parent->kind()) {
    case NodeKind::MemberExpression:
      if (slot != "object") return JsType::Unknown;
      if (parent->flag("computed")) return lookup("computed-member-object");
      if (const auto* prop = parent->child("property")) {
        if (const auto* name = prop->string_value("name")) return lookup("property:" + *name);
      }
      return JsType::Unknown;
    case NodeKind::CallExpression:
      return slot == "callee" ? lookup("call") : JsType::Unknown;
    case NodeKind::NewExpression:
      return slot == "callee" ? lookup("new") : JsType::Unknown;
    case NodeKind::UpdateExpression:
      return lookup("update");
    case NodeKind::BinaryExpression:
    case NodeKind::AssignmentExpression: {
      const auto* op = parent->string_value("operator");
      return op && arithmetic_operator(*op) ? lookup("arithmetic") : JsType::Unknown;
    }
    case NodeKind::UnaryExpression: {
      const auto* op = parent->string_value("operator");
      return op && (*op == "-" || *op == "+" || *op == "~") ? lookup("arithmetic")
                                                            : JsType::Unknown;
    }
    default:
      return JsType::Unknown;
  }
}

ResolveReport resolve_references(AstNode& ast, const normalizer::BuiltinRegistry& builtins,
                                 const UsageHints& hints, Rng& rng) {
  auto tree = build_scopes(ast, builtins);
  Rewriter rw(tree, &hints, &rng, identifier_names(ast));
  estree::visit_bindings(ast, rw);
  if (!rw.fresh.empty()) {
    auto* body = ast.list("body");
    if (!body) throw MalformedAst("root", "fresh declarations need a Program root");
    estree::NodeList decls;
    for (const auto& [name, type] : rw.fresh) {
      decls.emplace_back(estree::build::var_declaration("var", name, default_value(type)));
    }
    body->insert(body->begin(), std::make_move_iterator(decls.begin()),
                 std::make_move_iterator(decls.end()));
  }
  return std::move(rw.report);
}

std::vector<std::string> rescan(const AstNode& ast, const normalizer::BuiltinRegistry& builtins) {
  // Without an rng the rewriter only records; it still walks a mutable tree.
  AstNode copy = ast;
  auto tree = build_scopes(copy, builtins);
  Rewriter rw(tree, nullptr, nullptr, {});
  estree::visit_bindings(copy, rw);
  return rw.undeclared;
}

}  // namespace fraggen::resolver
