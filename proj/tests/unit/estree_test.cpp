#include <set>

#include <gtest/gtest.h>

#include "fraggen/errors.hpp"
#include "fraggen/estree/ast.hpp"
#include "fraggen/estree/builders.hpp"
#include "fraggen/estree/json_codec.hpp"
#include "fraggen/estree/traversal.hpp"
#include "support/fixtures.hpp"

namespace fraggen::estree {
namespace {

std::vector<std::string> preorder_labels(const AstNode& root) {
  std::vector<std::string> out;
  for (const auto* n : preorder(root)) {
    std::string label(kind_name(n->kind()));
    if (n->kind() == NodeKind::Identifier) label += "(" + *n->string_value("name") + ")";
    if (n->kind() == NodeKind::Literal) label += "(" + *n->string_value("raw") + ")";
    out.push_back(label);
  }
  return out;
}

TEST(Registry, EveryKindRoundTripsByName) {
  for (std::size_t i = 0; i < kNodeKindCount; ++i) {
    const auto kind = static_cast<NodeKind>(i);
    auto back = kind_from_name(kind_name(kind));
    ASSERT_TRUE(back.has_value());
    EXPECT_EQ(*back, kind);
  }
  EXPECT_FALSE(kind_from_name("WithStatement").has_value());
}

TEST(Decode, MinimalProgram) {
  auto ast = decode_ast(R"({"type":"Program","body":[{"type":"EmptyStatement"}]})");
  EXPECT_EQ(ast.kind(), NodeKind::Program);
  ASSERT_EQ(ast.list("body")->size(), 1u);
  EXPECT_EQ((*ast.list("body"))[0]->kind(), NodeKind::EmptyStatement);
}

TEST(Decode, RejectsKindOutsideRegistry) {
  try {
    decode_ast(R"({"type":"WithStatement","object":{"type":"Identifier","name":"o"},"body":{"type":"EmptyStatement"}})");
    FAIL() << "expected UnsupportedKind";
  } catch (const UnsupportedKind& e) {
    EXPECT_EQ(e.kind(), "WithStatement");
  }
}

TEST(Decode, NestedUnsupportedKindRejectsWholeFile) {
  EXPECT_THROW(decode_ast(R"({"type":"Program","body":[{"type":"ExpressionStatement",
      "expression":{"type":"ChainExpression","expression":{"type":"Identifier","name":"a"}}}]})"),
               UnsupportedKind);
}

TEST(Decode, SchemaMismatchReportsPath) {
  try {
    decode_ast(R"({"type":"Program","body":[{"type":"ExpressionStatement"}]})");
    FAIL() << "expected MalformedAst";
  } catch (const MalformedAst& e) {
    EXPECT_EQ(e.path(), "$.body[0].expression");
  }
  EXPECT_THROW(decode_ast(R"({"type":"Program","body":{}})"), MalformedAst);
  EXPECT_THROW(decode_ast("not json"), MalformedAst);
}

TEST(Decode, DropsLocationsAndOrdersSlotsBySchema) {
  auto a = decode_ast(R"({"right":{"type":"Literal","value":1,"raw":"1"},"start":0,"end":5,
      "type":"AssignmentExpression","left":{"type":"Identifier","name":"x","loc":{}},"operator":"="})");
  auto b = build::assign("=", build::identifier("x"), build::number(1));
  EXPECT_EQ(a, b);
}

TEST(Decode, RegexLiteralIsValueTriple) {
  auto ast = decode_ast(R"({"type":"Literal","value":{},"raw":"/a+/g","regex":{"pattern":"a+","flags":"g"}})");
  const auto* v = ast.value("value");
  ASSERT_NE(v, nullptr);
  ASSERT_TRUE(std::holds_alternative<Regex>(*v));
  EXPECT_EQ(std::get<Regex>(*v).pattern, "a+");
  EXPECT_EQ(*ast.string_value("raw"), "/a+/g");
  EXPECT_EQ(decode_ast(encode_ast(ast)), ast);
}

TEST(Decode, LoopExampleShape) {
  auto ast = decode_ast(testing::read_file(testing::fixture_dir("samples") / "loop_normalized.json"));
  const auto& body = *ast.list("body");
  ASSERT_EQ(body.size(), 2u);
  const auto& loop = *body[1];
  ASSERT_EQ(loop.kind(), NodeKind::ForStatement);
  const auto* block = loop.child("body");
  ASSERT_EQ(block->kind(), NodeKind::BlockStatement);
  const auto& stmt = *(*block->list("body"))[0];
  EXPECT_EQ(stmt.kind(), NodeKind::ExpressionStatement);
  EXPECT_EQ(stmt.child("expression")->kind(), NodeKind::AssignmentExpression);
}

TEST(Encode, MinimalProgram) {
  AstNode program = build::program({});
  program.set("sourceType", Absent{});
  program.list("body")->emplace_back(AstNode(NodeKind::EmptyStatement));
  EXPECT_EQ(nlohmann::json::parse(encode_ast(program)),
            nlohmann::json::parse(R"({"type":"Program","body":[{"type":"EmptyStatement"}]})"));
}

TEST(Encode, StubIsIncomplete) {
  AstNode program = build::program({});
  program.list("body")->emplace_back(AstNode::make_stub(NodeKind::ExpressionStatement));
  EXPECT_THROW(encode_ast(program), IncompleteAst);
  CodecOptions allow{.allow_stubs = true};
  EXPECT_EQ(decode_ast(encode_ast(program, allow), allow), program);
}

TEST(Encode, CorpusRoundTrip) {
  for (const auto& path : testing::fixture_files("corpus")) {
    auto a = decode_ast(testing::read_file(path));
    ASSERT_EQ(decode_ast(encode_ast(a)), a) << path;
  }
}

TEST(Preorder, EmptyStatementProgram) {
  auto ast = decode_ast(R"({"type":"Program","body":[{"type":"EmptyStatement"}]})");
  EXPECT_EQ(preorder_labels(ast), (std::vector<std::string>{"Program", "EmptyStatement"}));
}

TEST(Preorder, MemberAssignmentStatement) {
  auto stmt = build::expression_statement(build::assign(
      "=", build::member(build::identifier("v0"), build::identifier("v1"), true),
      build::binary("+", build::identifier("v1"), build::number(5))));
  EXPECT_EQ(preorder_labels(stmt),
            (std::vector<std::string>{"ExpressionStatement", "AssignmentExpression",
                                      "MemberExpression", "Identifier(v0)", "Identifier(v1)",
                                      "BinaryExpression", "Identifier(v1)", "Literal(5)"}));
}

TEST(Preorder, VisitsEveryNodeOnceRootFirst) {
  auto corpus = testing::load_fixtures("corpus", 200);
  for (const auto& ast : corpus) {
    auto order = preorder(ast);
    ASSERT_EQ(order.size(), count_nodes(ast));
    EXPECT_EQ(order.front(), &ast);
    std::set<const AstNode*> unique(order.begin(), order.end());
    EXPECT_EQ(unique.size(), order.size());
  }
}

TEST(Walk, ReportsSlotNames) {
  auto stmt = build::expression_statement(build::assign("=", build::identifier("a"), build::number(1)));
  std::vector<std::string> slots;
  walk(stmt, [&](const AstNode&, const Edge& e) {
    slots.emplace_back(slot_name(e));
    return true;
  });
  EXPECT_EQ(slots, (std::vector<std::string>{"", "expression", "left", "right"}));
}

}  // namespace
}  // namespace fraggen::estree
