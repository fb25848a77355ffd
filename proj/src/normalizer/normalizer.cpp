#include "fraggen/normalizer/normalizer.hpp"

#include <set>
#include <vector>

#include "fraggen/estree/bindings.hpp"
#include "fraggen/estree/traversal.hpp"

namespace fraggen::normalizer {
namespace {

using estree::AstNode;
using estree::BindingKind;
using estree::NodeKind;

class Collector : public estree::ConstBindingVisitor {
 public:
  struct Decl {
    std::string name;
    bool function;
  };
  std::vector<Decl> declared;
  std::set<std::string, std::less<>> referenced;

  void declare(const AstNode& id, BindingKind kind, const AstNode&) override {
    declared.push_back({*id.string_value("name"), estree::is_function_binding(kind)});
  }
  void reference(const AstNode& id, const AstNode*, std::string_view) override {
    referenced.insert(*id.string_value("name"));
  }
};

class Renamer : public estree::BindingVisitor {
 public:
  explicit Renamer(const RenameMap& map) : map_(map) {}

  void declare(AstNode& id, BindingKind, AstNode&) override { rename(id); }
  void reference(AstNode& id, AstNode*, std::string_view) override { rename(id); }

 private:
  void rename(AstNode& id) {
    if (const auto* to = map_.find(*id.string_value("name"))) {
      id.set("name", estree::Scalar(*to));
    }
  }
  const RenameMap& map_;
};

void expand_shorthand(AstNode& root) {
  for (auto* n : estree::preorder_mut(root)) {
    if (n->kind() == NodeKind::Property && n->flag("shorthand")) {
      n->set("shorthand", estree::Scalar(false));
    }
  }
}

bool is_eval_call(const AstNode& n) {
  if (n.is_stub() || n.kind() != NodeKind::CallExpression) return false;
  const auto* callee = n.child("callee");
  if (!callee || callee->is_stub() || callee->kind() != NodeKind::Identifier) return false;
  if (*callee->string_value("name") != "eval") return false;
  const auto* args = n.list("arguments");
  return args && args->size() == 1 && (*args)[0] && !(*args)[0]->is_stub() &&
         (*args)[0]->kind() == NodeKind::Literal && (*args)[0]->string_value("value");
}

class EvalInliner {
 public:
  EvalInliner(const ParseFn& parse, int max_depth) : parse_(parse), max_depth_(max_depth) {}

  void run(AstNode& node, int depth) {
    for (auto& s : node.slots()) {
      if (auto* box = std::get_if<estree::Box<AstNode>>(&s)) {
        if (*box) slot(*box, depth);
      } else if (auto* list = std::get_if<estree::NodeList>(&s)) {
        for (auto& item : *list) {
          if (item) slot(item, depth);
        }
      }
    }
  }

 private:
  void slot(estree::Box<AstNode>& box, int depth) {
    AstNode& n = *box;
    if (depth <= max_depth_) {
      if (n.kind() == NodeKind::ExpressionStatement && !n.is_stub()) {
        auto* expr = n.child("expression");
        if (expr && is_eval_call(*expr)) {
          if (auto body = parse_body(*expr)) {
            if (auto single = lone_expression(*body)) {
              n.set("expression", estree::Box<AstNode>(std::move(*single)));
              slot(box, depth + 1);
            } else {
              AstNode block(NodeKind::BlockStatement);
              block.set("body", std::move(*body));
              box = std::move(block);
              run(*box, depth + 1);
            }
            return;
          }
        }
      } else if (is_eval_call(n)) {
        if (auto body = parse_body(n)) {
          if (auto single = lone_expression(*body)) {
            box = std::move(*single);
            slot(box, depth + 1);
            return;
          }
        }
      }
    }
    run(n, depth);
  }

  std::optional<estree::NodeList> parse_body(const AstNode& call) {
    const auto& arg = *(*call.list("arguments"))[0];
    auto parsed = parse_(*arg.string_value("value"));
    if (!parsed || parsed->kind() != NodeKind::Program) return std::nullopt;
    return std::move(*parsed->list("body"));
  }

  static std::optional<AstNode> lone_expression(estree::NodeList& body) {
    if (body.size() != 1 || !body[0] || body[0]->kind() != NodeKind::ExpressionStatement) {
      return std::nullopt;
    }
    if (body[0]->value("directive")) return std::nullopt;
    auto* expr = body[0]->child("expression");
    if (!expr) return std::nullopt;
    return std::move(*expr);
  }

  const ParseFn& parse_;
  int max_depth_;
};

}  // namespace

const std::string* RenameMap::find(std::string_view original) const {
  if (auto it = variables.find(std::string(original)); it != variables.end()) return &it->second;
  if (auto it = functions.find(std::string(original)); it != functions.end()) return &it->second;
  return nullptr;
}

Normalized normalize(const AstNode& ast, const BuiltinRegistry& builtins) {
  Normalized out{ast, {}};
  expand_shorthand(out.ast);

  Collector collected;
  estree::visit_bindings<const AstNode>(out.ast, collected);

  std::set<std::string, std::less<>> declared;
  for (const auto& d : collected.declared) declared.insert(d.name);
  std::set<std::string, std::less<>> taken;
  for (const auto& r : collected.referenced) {
    if (!declared.contains(r)) taken.insert(r);
  }

  std::size_t next_v = 0;
  std::size_t next_f = 0;
  auto fresh = [&](char prefix, std::size_t& counter) {
    std::string name;
    do {
      name = prefix + std::to_string(counter++);
    } while (taken.contains(name));
    return name;
  };

  for (const auto& d : collected.declared) {
    if (builtins.contains(d.name) || out.renames.find(d.name)) continue;
    if (d.function) {
      out.renames.functions.emplace(d.name, fresh('f', next_f));
    } else {
      out.renames.variables.emplace(d.name, fresh('v', next_v));
    }
  }

  Renamer renamer(out.renames);
  estree::visit_bindings(out.ast, renamer);
  return out;
}

AstNode inline_eval(const AstNode& ast, const ParseFn& parse, int max_depth) {
  AstNode out = ast;
  EvalInliner(parse, max_depth).run(out, 1);
  return out;
}

}  // namespace fraggen::normalizer
