#include <gtest/gtest.h>

#include <set>

#include "fraggen/errors.hpp"
#include "fraggen/estree/builders.hpp"
#include "fraggen/estree/traversal.hpp"
#include "fraggen/normalizer/builtins.hpp"
#include "fraggen/printer/printer.hpp"
#include "fraggen/resolver/resolver.hpp"
#include "support/fixtures.hpp"

namespace fraggen::resolver {
namespace {

using estree::AstNode;
using estree::NodeKind;
namespace build = estree::build;

const normalizer::BuiltinRegistry& node_builtins() {
  static const auto r = normalizer::BuiltinRegistry::for_engine("node");
  return r;
}

const UsageHints& hints() {
  static const auto h = UsageHints::defaults();
  return h;
}

std::string resolved(const std::string& snippet, std::uint64_t seed = 1,
                     ResolveReport* report = nullptr) {
  auto ast = testing::snippet(snippet);
  Rng rng(seed);
  auto r = resolve_references(ast, node_builtins(), hints(), rng);
  if (report) *report = r;
  EXPECT_TRUE(rescan(ast, node_builtins()).empty()) << snippet;
  return printer::print_program(ast);
}

const Binding* binding_in(const ScopeTree& t, NodeKind owner_kind, const std::string& name) {
  for (const auto& s : t.scopes) {
    if (s.owner->kind() == owner_kind) {
      auto it = s.bindings.find(name);
      if (it != s.bindings.end()) return &it->second;
    }
  }
  return nullptr;
}

TEST(Scopes, VarHoistsOutOfBlock) {
  auto ast = testing::snippet("block_var");
  auto t = build_scopes(ast, node_builtins());
  EXPECT_NE(t.scopes[0].bindings.find("v0"), t.scopes[0].bindings.end());
  EXPECT_EQ(binding_in(t, NodeKind::BlockStatement, "v0"), nullptr);
}

TEST(Scopes, CatchParamOnlyInCatch) {
  auto ast = testing::snippet("catch_param");
  auto t = build_scopes(ast, node_builtins());
  EXPECT_EQ(t.scopes[0].bindings.count("v0"), 0u);
  const auto* b = binding_in(t, NodeKind::CatchClause, "v0");
  ASSERT_NE(b, nullptr);
  EXPECT_EQ(b->kind, estree::BindingKind::CatchParam);
  EXPECT_EQ(b->type, JsType::Undefined);
}

TEST(Scopes, HoistedUseIsDeclared) {
  EXPECT_TRUE(rescan(testing::snippet("hoisted_use"), node_builtins()).empty());
}

TEST(Scopes, BuiltinsInRootWithTypes) {
  auto t = build_scopes(testing::snippet("builtin_use"), node_builtins());
  const auto* math = t.lookup(0, "Math");
  ASSERT_NE(math, nullptr);
  EXPECT_EQ(math->origin, Origin::Builtin);
  EXPECT_TRUE(rescan(testing::snippet("builtin_use"), node_builtins()).empty());
}

TEST(Scopes, BlockAndLoopLexicalsDoNotLeak) {
  for (const char* s : {"let_in_block", "for_let", "switch_scope"}) {
    EXPECT_EQ(rescan(testing::snippet(s), node_builtins()), std::vector<std::string>{"v0"}) << s;
  }
  EXPECT_EQ(rescan(testing::snippet("class_expr_name"), node_builtins()),
            std::vector<std::string>{"v1"});
  EXPECT_TRUE(rescan(testing::snippet("arguments_use"), node_builtins()).size() == 1);
}

TEST(InferType, Table) {
  EXPECT_EQ(infer_static_type(build::array({})), JsType::Array);
  EXPECT_EQ(infer_static_type(build::function_expression({})), JsType::Function);
  EXPECT_EQ(infer_static_type(build::binary("+", build::identifier("v1"), build::identifier("v2"))),
            JsType::Unknown);
  EXPECT_EQ(infer_static_type(build::boolean(true)), JsType::Boolean);
  EXPECT_EQ(infer_static_type(build::null_literal()), JsType::Null);
  EXPECT_EQ(infer_static_type(build::number(1)), JsType::Number);
  EXPECT_EQ(infer_static_type(build::object()), JsType::Object);
  EXPECT_EQ(infer_static_type(build::regex("a", "g")), JsType::Regex);
  EXPECT_EQ(infer_static_type(build::string("s")), JsType::String);
  EXPECT_EQ(infer_static_type(build::identifier("undefined")), JsType::Undefined);
  EXPECT_EQ(infer_static_type(build::identifier("v3")), JsType::Unknown);
}

TEST(Resolve, LengthPicksString) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    ResolveReport r;
    EXPECT_EQ(resolved("length_hint", seed, &r), "var v0 = \"s\";\nvar v1 = 1;\nv0.length;");
    ASSERT_EQ(r.replacements.size(), 1u);
    EXPECT_EQ(r.replacements[0].from, "v9");
    EXPECT_EQ(r.replacements[0].type, JsType::String);
  }
}

TEST(Resolve, CallPicksFunction) {
  EXPECT_EQ(resolved("call_hint"), "function f0() {}\nf0();");
}

TEST(Resolve, AssignmentUpdatesType) {
  // v0 becomes an array before the computed access.
  EXPECT_EQ(resolved("typed_assign"), "var v0;\nv0 = [];\nv0[0];");
}

TEST(Resolve, EmptyScopeGetsFreshVar) {
  ResolveReport r;
  EXPECT_EQ(resolved("undeclared_only", 1, &r), "var v0 = 0;\nv0;");
  EXPECT_EQ(r.fresh, std::vector<std::string>{"v0"});
}

TEST(Resolve, FreshVarTypedByUsage) {
  auto ast = build::program({build::expression_statement(build::call(build::identifier("v5"), {}))});
  Rng rng(1);
  resolve_references(ast, node_builtins(), hints(), rng);
  EXPECT_EQ(printer::print_program(ast), "var v0 = function() {};\nv0();");
}

TEST(Resolve, NestedScopesSeeParams) {
  // `+` gives no hint, so any visible name may be chosen: f0 or v1.
  std::set<std::string> seen;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    ResolveReport r;
    resolved("nested_function_scope", seed, &r);
    ASSERT_EQ(r.replacements.size(), 1u);
    EXPECT_EQ(r.replacements[0].type, JsType::Unknown);
    seen.insert(r.replacements[0].to);
  }
  EXPECT_EQ(seen, (std::set<std::string>{"f0", "v1"}));
  // Arrow body: only v0 is visible.
  EXPECT_EQ(resolved("arrow_expr_body"), "var v0 = () => v0 + 1;");
}

TEST(Resolve, BuiltinsUntouched) {
  ResolveReport r;
  auto before = printer::print_program(testing::snippet("builtin_use"));
  EXPECT_EQ(resolved("builtin_use", 1, &r), before);
  EXPECT_TRUE(r.replacements.empty());
}

TEST(Resolve, ScopeLeaksRepaired) {
  for (const char* s : {"let_in_block", "for_let", "switch_scope", "class_expr_name", "arguments_use"}) {
    resolved(s);
  }
}

TEST(Resolve, SoundAndIdempotentOnMangledCorpus) {
  // Renaming every third identifier reference to a fresh name leaves
  // dangling references behind, like a generated test would.
  std::size_t repaired = 0;
  for (const auto& original : testing::load_fixtures("corpus", 150)) {
    AstNode ast = original;
    int counter = 0;
    for (auto* n : estree::preorder_mut(ast)) {
      if (n->kind() == NodeKind::Identifier && ++counter % 3 == 0) {
        n->set("name", estree::Scalar(std::string("zz") + std::to_string(counter)));
      }
    }
    const auto before = rescan(ast, node_builtins()).size();
    Rng rng(static_cast<std::uint64_t>(counter));
    auto report = resolve_references(ast, node_builtins(), hints(), rng);
    EXPECT_EQ(report.replacements.size(), before);
    repaired += before;
    EXPECT_TRUE(rescan(ast, node_builtins()).empty());
    AstNode again = ast;
    auto second = resolve_references(again, node_builtins(), hints(), rng);
    EXPECT_TRUE(second.replacements.empty());
    EXPECT_EQ(again, ast);
  }
  EXPECT_GT(repaired, 100u);
}

TEST(Hints, RejectsBadTables) {
  EXPECT_THROW(UsageHints::from_json(nlohmann::json::array()), ConfigError);
  EXPECT_THROW(UsageHints::from_json({{"call", "fnction"}}), ConfigError);
  auto h = UsageHints::from_json({{"property:push", "array"}});
  auto m = build::member(build::identifier("x"), build::identifier("push"), false);
  EXPECT_EQ(h.infer(&m, "object"), JsType::Array);
  EXPECT_EQ(h.infer(&m, "property"), JsType::Unknown);
}

}  // namespace
}  // namespace fraggen::resolver
