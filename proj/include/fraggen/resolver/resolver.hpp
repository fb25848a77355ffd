#pragma once

#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "fraggen/estree/ast.hpp"
#include "fraggen/estree/bindings.hpp"
#include "fraggen/js_type.hpp"
#include "fraggen/normalizer/builtins.hpp"

namespace fraggen::resolver {

using Rng = std::mt19937_64;

enum class Origin : std::uint8_t { Declared, Builtin, Implicit };

struct Binding {
  estree::BindingKind kind = estree::BindingKind::Var;
  JsType type = JsType::Undefined;
  Origin origin = Origin::Declared;
};

struct Scope {
  const estree::AstNode* owner = nullptr;
  estree::ScopeKind kind = estree::ScopeKind::Program;
  int parent = -1;
  std::map<std::string, Binding, std::less<>> bindings;
};

// scopes[0] is the root. Declarations are hoisted: a scope holds every name
// bound in it, wherever the declaration appears.
struct ScopeTree {
  std::vector<Scope> scopes;
  std::map<const estree::AstNode*, int> by_owner;

  int index_of(const estree::AstNode* owner) const;
  // Innermost binding of `name` visible from scope `at`, or null.
  const Binding* lookup(int at, std::string_view name) const;
};

// Builtins land in the root scope with their registry types (test functions
// are functions); `arguments` is implicit in every non-arrow function.
ScopeTree build_scopes(const estree::AstNode& ast, const normalizer::BuiltinRegistry& builtins);

JsType infer_static_type(const estree::AstNode& expr);

// Usage pattern -> type. Keys: "property:<name>" (x.<name>), "call",
// "new", "update", "arithmetic", "computed-member-object".
class UsageHints {
 public:
  UsageHints() = default;
  // Throws ConfigError.
  static UsageHints from_json(const nlohmann::json& doc);
  static UsageHints load(const std::filesystem::path& file);
  // usage_hints.json in the data directory.
  static UsageHints defaults();

  JsType infer(const estree::AstNode* parent, std::string_view slot) const;

 private:
  JsType lookup(const std::string& key) const;
  std::map<std::string, JsType, std::less<>> table_;
};

struct Replacement {
  std::string from;
  std::string to;
  JsType type;
};

struct ResolveReport {
  std::vector<Replacement> replacements;
  std::vector<std::string> fresh;  // names given a new top-level `var`
};

// Renames every referenced-but-undeclared identifier to a visible binding,
// preferring ones whose current type matches the usage. With nothing
// visible, prepends `var vN = <default for the type>;` to the program.
ResolveReport resolve_references(estree::AstNode& ast,
                                 const normalizer::BuiltinRegistry& builtins,
                                 const UsageHints& hints, Rng& rng);

// Names referenced without a visible declaration, in source order.
std::vector<std::string> rescan(const estree::AstNode& ast,
                                const normalizer::BuiltinRegistry& builtins);

}  // namespace fraggen::resolver
