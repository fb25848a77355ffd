#pragma once

#include <cstdint>
#include <string_view>
#include <type_traits>
#include <vector>

#include "fraggen/estree/ast.hpp"

// Identifier roles and lexical scopes, shared by the normalizer (which only
// cares about declarations vs. references) and the resolver (which also
// needs the scope each declaration lands in).
namespace fraggen::estree {

enum class ScopeKind : std::uint8_t { Program, Function, Block, For, Catch, Switch, Class };

enum class BindingKind : std::uint8_t {
  Var,
  Let,
  Const,
  Function,      // FunctionDeclaration name
  FunctionName,  // a named function expression's own name
  Param,
  CatchParam,
  Class,
};

// Function and named-function-expression names form the `f` partition of
// the normalizer; every other binding is a variable.
constexpr bool is_function_binding(BindingKind k) {
  return k == BindingKind::Function || k == BindingKind::FunctionName;
}

template <typename Node>
class BasicBindingVisitor {
 public:
  virtual ~BasicBindingVisitor() = default;
  virtual void enter_scope(Node& /*owner*/, ScopeKind /*kind*/) {}
  virtual void exit_scope(Node& /*owner*/, ScopeKind /*kind*/) {}
  // `scope` is the owner of the scope the name binds in, after hoisting.
  virtual void declare(Node& /*id*/, BindingKind /*kind*/, Node& /*scope*/) {}
  // Read or write of a name. `parent` is null for a bare root identifier.
  virtual void reference(Node& /*id*/, Node* /*parent*/, std::string_view /*slot*/) {}
  // Simple `=` assignment or declarator init, reported after both sides
  // were visited.
  virtual void assigned(Node& /*id*/, Node& /*value*/) {}
};

using BindingVisitor = BasicBindingVisitor<AstNode>;
using ConstBindingVisitor = BasicBindingVisitor<const AstNode>;

namespace detail {

template <typename Node>
class BindingWalk {
 public:
  explicit BindingWalk(BasicBindingVisitor<Node>& v) : v_(v) {}

  void run(Node& root) {
    push(root, ScopeKind::Program);
    if (root.kind() == NodeKind::Program) {
      statements(root, "body");
    } else {
      visit(root, nullptr, {});
    }
    pop();
  }

 private:
  using K = NodeKind;
  struct Frame {
    Node* owner;
    ScopeKind kind;
  };

  static auto* child(Node& n, std::string_view slot) { return n.child(slot); }
  static auto* list(Node& n, std::string_view slot) { return n.list(slot); }

  void push(Node& owner, ScopeKind kind) {
    scopes_.push_back({&owner, kind});
    v_.enter_scope(owner, kind);
  }

  void pop() {
    auto f = scopes_.back();
    scopes_.pop_back();
    v_.exit_scope(*f.owner, f.kind);
  }

  Node& function_scope() {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      if (it->kind == ScopeKind::Function || it->kind == ScopeKind::Program) return *it->owner;
    }
    return *scopes_.front().owner;
  }

  Node& current_scope() { return *scopes_.back().owner; }

  void statements(Node& n, std::string_view slot) {
    if (auto* items = list(n, slot)) {
      for (auto& item : *items) {
        if (item) visit(*item, &n, slot);
      }
    }
  }

  void visit_slot(Node& n, std::string_view slot) {
    if (auto* c = child(n, slot)) visit(*c, &n, slot);
  }

  void children(Node& n) {
    const auto schema = spec(n.kind()).slots;
    for (const auto& s : schema) {
      if (s.arity == Arity::List) {
        statements(n, s.name);
      } else if (s.arity != Arity::Value) {
        visit_slot(n, s.name);
      }
    }
  }

  void visit(Node& n, Node* parent, std::string_view slot) {
    if (n.is_stub()) return;
    switch (n.kind()) {
      case K::Identifier:
        v_.reference(n, parent, slot);
        return;
      case K::VariableDeclaration:
        declaration(n);
        return;
      case K::FunctionDeclaration:
        if (auto* id = child(n, "id")) v_.declare(*id, BindingKind::Function, function_scope());
        function(n);
        return;
      case K::FunctionExpression:
      case K::ArrowFunctionExpression:
        function(n);
        return;
      case K::ClassDeclaration:
        if (auto* id = child(n, "id")) v_.declare(*id, BindingKind::Class, current_scope());
        visit_slot(n, "superClass");
        visit_slot(n, "body");
        return;
      case K::ClassExpression:
        if (auto* id = child(n, "id")) {
          push(n, ScopeKind::Class);
          v_.declare(*id, BindingKind::Class, n);
          visit_slot(n, "superClass");
          visit_slot(n, "body");
          pop();
        } else {
          visit_slot(n, "superClass");
          visit_slot(n, "body");
        }
        return;
      case K::MethodDefinition:
      case K::Property:
        if (n.flag("computed")) visit_slot(n, "key");
        visit_slot(n, "value");
        return;
      case K::MemberExpression:
        visit_slot(n, "object");
        if (n.flag("computed")) visit_slot(n, "property");
        return;
      case K::LabeledStatement:
        visit_slot(n, "body");
        return;
      case K::BreakStatement:
      case K::ContinueStatement:
      case K::MetaProperty:
        return;
      case K::BlockStatement:
        push(n, ScopeKind::Block);
        statements(n, "body");
        pop();
        return;
      case K::ForStatement:
        push(n, ScopeKind::For);
        children(n);
        pop();
        return;
      case K::ForInStatement:
      case K::ForOfStatement:
        push(n, ScopeKind::For);
        if (auto* left = child(n, "left")) {
          if (left->kind() == K::VariableDeclaration) {
            declaration(*left);
          } else {
            target(*left, &n, "left");
          }
        }
        visit_slot(n, "right");
        visit_slot(n, "body");
        pop();
        return;
      case K::CatchClause:
        push(n, ScopeKind::Catch);
        if (auto* p = child(n, "param")) pattern(*p, BindingKind::CatchParam, n);
        if (auto* body = child(n, "body")) {
          if (body->kind() == K::BlockStatement) {
            statements(*body, "body");
          } else {
            visit(*body, &n, "body");
          }
        }
        pop();
        return;
      case K::SwitchStatement:
        visit_slot(n, "discriminant");
        push(n, ScopeKind::Switch);
        statements(n, "cases");
        pop();
        return;
      case K::AssignmentExpression: {
        auto* left = child(n, "left");
        if (left) target(*left, &n, "left");
        visit_slot(n, "right");
        auto* right = child(n, "right");
        const auto* op = n.string_value("operator");
        if (left && right && left->kind() == K::Identifier && !left->is_stub() && op &&
            *op == "=") {
          v_.assigned(*left, *right);
        }
        return;
      }
      case K::ObjectPattern:
      case K::ArrayPattern:
      case K::AssignmentPattern:
        target(n, parent, slot);
        return;
      default:
        children(n);
        return;
    }
  }

  void declaration(Node& decl) {
    const auto* kind_name = decl.string_value("kind");
    BindingKind kind = BindingKind::Var;
    if (kind_name && *kind_name == "let") kind = BindingKind::Let;
    if (kind_name && *kind_name == "const") kind = BindingKind::Const;
    Node& scope = kind == BindingKind::Var ? function_scope() : current_scope();
    auto* items = list(decl, "declarations");
    if (!items) return;
    for (auto& d : *items) {
      if (!d || d->is_stub()) continue;
      if (d->kind() != K::VariableDeclarator) {
        visit(*d, &decl, "declarations");
        continue;
      }
      auto* id = child(*d, "id");
      if (id) pattern(*id, kind, scope);
      auto* init = child(*d, "init");
      if (init) {
        visit(*init, d.get(), "init");
        if (id && id->kind() == K::Identifier && !id->is_stub()) v_.assigned(*id, *init);
      }
    }
  }

  void function(Node& fn) {
    push(fn, ScopeKind::Function);
    if (fn.kind() == K::FunctionExpression) {
      if (auto* id = child(fn, "id")) v_.declare(*id, BindingKind::FunctionName, fn);
    }
    if (auto* params = list(fn, "params")) {
      for (auto& p : *params) {
        if (p) pattern(*p, BindingKind::Param, fn);
      }
    }
    if (auto* body = child(fn, "body")) {
      if (body->kind() == K::BlockStatement && !body->is_stub()) {
        statements(*body, "body");
      } else {
        visit(*body, &fn, "body");
      }
    }
    pop();
  }

  // Binding patterns: identifiers declare.
  void pattern(Node& p, BindingKind kind, Node& scope) {
    if (p.is_stub()) return;
    switch (p.kind()) {
      case K::Identifier:
        v_.declare(p, kind, scope);
        return;
      case K::ObjectPattern:
        if (auto* props = list(p, "properties")) {
          for (auto& prop : *props) {
            if (!prop || prop->is_stub()) continue;
            if (prop->kind() == K::Property) {
              if (prop->flag("computed")) visit_slot(*prop, "key");
              if (auto* value = child(*prop, "value")) pattern(*value, kind, scope);
            } else {
              pattern(*prop, kind, scope);
            }
          }
        }
        return;
      case K::ArrayPattern:
        if (auto* elems = list(p, "elements")) {
          for (auto& e : *elems) {
            if (e) pattern(*e, kind, scope);
          }
        }
        return;
      case K::AssignmentPattern:
        if (auto* left = child(p, "left")) pattern(*left, kind, scope);
        visit_slot(p, "right");
        return;
      case K::RestElement:
        if (auto* arg = child(p, "argument")) pattern(*arg, kind, scope);
        return;
      default:
        visit(p, nullptr, {});
        return;
    }
  }

  // Assignment targets: identifiers are references (writes).
  void target(Node& t, Node* parent, std::string_view slot) {
    if (t.is_stub()) return;
    switch (t.kind()) {
      case K::ObjectPattern:
        if (auto* props = list(t, "properties")) {
          for (auto& prop : *props) {
            if (!prop || prop->is_stub()) continue;
            if (prop->kind() == K::Property) {
              if (prop->flag("computed")) visit_slot(*prop, "key");
              if (auto* value = child(*prop, "value")) target(*value, prop.get(), "value");
            } else {
              target(*prop, &t, "properties");
            }
          }
        }
        return;
      case K::ArrayPattern:
        if (auto* elems = list(t, "elements")) {
          for (auto& e : *elems) {
            if (e) target(*e, &t, "elements");
          }
        }
        return;
      case K::AssignmentPattern:
        if (auto* left = child(t, "left")) target(*left, &t, "left");
        visit_slot(t, "right");
        return;
      case K::RestElement:
        if (auto* arg = child(t, "argument")) target(*arg, &t, "argument");
        return;
      default:
        visit(t, parent, slot);
        return;
    }
  }

  BasicBindingVisitor<Node>& v_;
  std::vector<Frame> scopes_;
};

}  // namespace detail

// Walks `root` in source order reporting scopes, declarations, references
// and simple assignments. Non-Program roots get a synthetic program scope
// owned by the root itself.
template <typename Node>
void visit_bindings(Node& root, BasicBindingVisitor<Node>& visitor) {
  static_assert(std::is_same_v<std::remove_const_t<Node>, AstNode>);
  detail::BindingWalk<Node>(visitor).run(root);
}

}  // namespace fraggen::estree
