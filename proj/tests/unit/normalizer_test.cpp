#include <gtest/gtest.h>

#include <random>

#include "fraggen/errors.hpp"
#include "fraggen/estree/traversal.hpp"
#include "fraggen/normalizer/normalizer.hpp"
#include "fraggen/printer/printer.hpp"
#include "support/fixtures.hpp"

namespace fraggen::normalizer {
namespace {

using estree::AstNode;
using estree::NodeKind;
using testing::snippet;

const BuiltinRegistry& node_builtins() {
  static const auto reg = BuiltinRegistry::for_engine("node");
  return reg;
}

std::string normalized_source(const std::string& name) {
  return printer::print_program(normalize(snippet(name), node_builtins()).ast);
}

TEST(Builtins, EngineFilesLoad) {
  for (const char* engine : {"node", "chakra", "v8", "jsc", "spidermonkey"}) {
    auto reg = BuiltinRegistry::for_engine(engine);
    EXPECT_TRUE(reg.contains("Math")) << engine;
    EXPECT_EQ(reg.type_of("Math"), JsType::Object);
    for (const auto& n : reg.names()) EXPECT_FALSE(is_normalized_name(n)) << n;
  }
  EXPECT_TRUE(BuiltinRegistry::for_engine("chakra").contains("WScript"));
  EXPECT_TRUE(BuiltinRegistry::for_engine("v8").is_test_function("print"));
  EXPECT_FALSE(node_builtins().contains("print"));
}

TEST(Builtins, RejectsNormalizedNames) {
  EXPECT_THROW(BuiltinRegistry::from_json({{"names", {"v3"}}}), ConfigError);
  EXPECT_THROW(BuiltinRegistry::from_json({{"types", {{"x", "integer"}}}}), ConfigError);
}

TEST(Normalize, SingleDeclarationKeepsFreeName) {
  EXPECT_EQ(normalized_source("decl_b"), "var v0 = a + 1;");
}

TEST(Normalize, LoopSampleMatchesNormalizedForm) {
  auto original = testing::fixture_dir("samples") / "loop_original.json";
  auto expected = testing::fixture_dir("samples") / "loop_normalized.json";
  auto result = normalize(estree::decode_ast(testing::read_file(original)), node_builtins());
  EXPECT_EQ(result.ast, estree::decode_ast(testing::read_file(expected)));
  EXPECT_EQ(*result.renames.find("obj"), "v0");
  EXPECT_EQ(*result.renames.find("i"), "v1");
}

TEST(Normalize, BuiltinsUntouched) {
  EXPECT_EQ(normalized_source("math_floor"), "var v0 = 2;\nMath.floor(v0);");
}

TEST(Normalize, SkipsNumbersTakenByFreeNames) {
  EXPECT_EQ(normalized_source("free_v0"), "v0;\nvar v1 = 1;");
}

TEST(Normalize, ExpandsShorthandBeforeRenaming) {
  EXPECT_EQ(normalized_source("shorthand"), "var v0 = 1;\nvar v1 = { a: v0 };");
}

TEST(Normalize, PropertyKeysAndLabelsKeepNames) {
  auto out = normalized_source("keys_and_labels");
  EXPECT_NE(out.find("{ k: 1 }"), std::string::npos) << out;
  EXPECT_NE(out.find("outer:"), std::string::npos) << out;
  EXPECT_NE(out.find("v0.k = v1"), std::string::npos) << out;
  EXPECT_NE(out.find("break outer;"), std::string::npos) << out;
}

TEST(Normalize, FunctionsUseTheirOwnPartition) {
  auto r = normalize(snippet("function_decl"), node_builtins());
  EXPECT_EQ(*r.renames.find("g"), "f0");
  EXPECT_EQ(*r.renames.find("p"), "v0");
  EXPECT_EQ(printer::print_program(r.ast), "function f0(v0) {\n  return v0;\n}\nf0(1);");
}

TEST(Normalize, ParamsCatchAndPatternsAreDeclarations) {
  auto r = normalize(snippet("params_catch_patterns"), node_builtins());
  for (const char* name : {"a", "b", "d", "e", "err"}) {
    EXPECT_NE(r.renames.find(name), nullptr) << name;
  }
  // `c` is only a key in the pattern.
  EXPECT_EQ(r.renames.find("c"), nullptr);
}

TEST(Normalize, IdempotentOnCorpus) {
  for (const auto& ast : testing::load_fixtures("corpus", 400)) {
    auto once = normalize(ast, node_builtins()).ast;
    auto twice = normalize(once, node_builtins()).ast;
    ASSERT_EQ(once, twice);
  }
}

// Renames identifiers by brute force: every Identifier carrying a name from
// `map`, except member properties, object keys and labels.
AstNode rename_naively(AstNode ast, const std::map<std::string, std::string>& map) {
  std::set<const AstNode*> skip;
  estree::walk(ast, [&](const AstNode& n, const estree::Edge&) {
    if (n.is_stub()) return true;
    auto mark = [&](const char* slot) {
      if (const auto* c = n.child(slot)) skip.insert(c);
    };
    switch (n.kind()) {
      case NodeKind::MemberExpression:
        if (!n.flag("computed")) mark("property");
        break;
      case NodeKind::Property:
      case NodeKind::MethodDefinition:
        if (!n.flag("computed")) mark("key");
        break;
      case NodeKind::LabeledStatement:
      case NodeKind::BreakStatement:
      case NodeKind::ContinueStatement:
        mark("label");
        break;
      default:
        break;
    }
    return true;
  });
  for (auto* n : estree::preorder_mut(ast)) {
    if (n->kind() != NodeKind::Identifier || skip.contains(n)) continue;
    if (auto it = map.find(*n->string_value("name")); it != map.end()) {
      n->set("name", estree::Scalar(it->second));
    }
  }
  return ast;
}

TEST(Normalize, AlphaEquivalentProgramsNormalizeIdentically) {
  std::mt19937 rng(11);
  for (const auto& ast : testing::load_fixtures("corpus", 300)) {
    auto base = normalize(ast, node_builtins());
    std::map<std::string, std::string> alpha;
    for (const auto* part : {&base.renames.variables, &base.renames.functions}) {
      for (const auto& [from, to] : *part) {
        alpha[to] = "q" + std::to_string(rng() % 100000) + "_" + from;
      }
    }
    auto renamed = rename_naively(base.ast, alpha);
    ASSERT_EQ(normalize(renamed, node_builtins()).ast, base.ast);
  }
}

TEST(Normalize, OutputNamesNeverCollideWithBuiltins) {
  for (const auto& ast : testing::load_fixtures("corpus", 300)) {
    auto r = normalize(ast, node_builtins());
    for (const auto* part : {&r.renames.variables, &r.renames.functions}) {
      for (const auto& [from, to] : *part) {
        EXPECT_FALSE(node_builtins().contains(to));
        EXPECT_TRUE(is_normalized_name(to));
      }
    }
  }
}

TEST(InlineEval, LoneExpressionReplacesCall) {
  auto out = inline_eval(snippet("eval_const"), testing::snippet_parser());
  EXPECT_EQ(printer::print_program(out), "1 + 1;");
}

TEST(InlineEval, ExpressionPositionKeepsSurroundings) {
  auto out = inline_eval(snippet("eval_in_expr"), testing::snippet_parser());
  EXPECT_EQ(printer::print_program(out), "var r = (1 + 1) * 2;");
}

TEST(InlineEval, NonConstantArgumentUnchanged) {
  auto in = snippet("eval_var");
  EXPECT_EQ(inline_eval(in, testing::snippet_parser()), in);
}

TEST(InlineEval, UnparseableArgumentUnchanged) {
  auto in = snippet("eval_bad");
  EXPECT_EQ(inline_eval(in, testing::snippet_parser()), in);
}

TEST(InlineEval, StatementsBecomeBlockAndGetNormalized) {
  auto inlined = inline_eval(snippet("eval_multi"), testing::snippet_parser());
  EXPECT_EQ(printer::print_program(inlined), "{\n  var q = 3;\n  q;\n}");
  auto r = normalize(inlined, node_builtins());
  ASSERT_NE(r.renames.find("q"), nullptr);
  EXPECT_EQ(*r.renames.find("q"), "v0");
}

TEST(InlineEval, RecursionStopsAtDepthThree) {
  auto out = inline_eval(snippet("eval_nested"), testing::snippet_parser());
  EXPECT_EQ(printer::print_program(out), printer::print_program(snippet("src_l3")));
  auto shallow = inline_eval(snippet("eval_nested"), testing::snippet_parser(), 1);
  EXPECT_EQ(printer::print_program(shallow), printer::print_program(snippet("src_l1")));
}

}  // namespace
}  // namespace fraggen::normalizer
