#include "fraggen/estree/builders.hpp"

#include <charconv>

#include <nlohmann/json.hpp>

namespace fraggen::estree::build {

NodeList to_list(std::vector<AstNode> nodes) {
  NodeList out;
  out.reserve(nodes.size());
  for (auto& n : nodes) out.emplace_back(std::move(n));
  return out;
}

AstNode identifier(std::string name) {
  AstNode n(NodeKind::Identifier);
  n.set("name", Scalar(std::move(name)));
  return n;
}

AstNode number(double value) {
  AstNode n(NodeKind::Literal);
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  n.set("value", Scalar(value));
  n.set("raw", Scalar(std::string(buf, res.ptr)));
  return n;
}

AstNode string(std::string value) {
  AstNode n(NodeKind::Literal);
  n.set("raw", Scalar(nlohmann::json(value).dump()));
  n.set("value", Scalar(std::move(value)));
  return n;
}

AstNode boolean(bool value) {
  AstNode n(NodeKind::Literal);
  n.set("value", Scalar(value));
  n.set("raw", Scalar(std::string(value ? "true" : "false")));
  return n;
}

AstNode null_literal() {
  AstNode n(NodeKind::Literal);
  n.set("value", Scalar(nullptr));
  n.set("raw", Scalar(std::string("null")));
  return n;
}

AstNode regex(std::string pattern, std::string flags) {
  AstNode n(NodeKind::Literal);
  std::string raw = "/" + pattern + "/" + flags;
  n.set("value", Scalar(Regex{std::move(pattern), std::move(flags)}));
  n.set("raw", Scalar(std::move(raw)));
  return n;
}

AstNode program(std::vector<AstNode> body) {
  AstNode n(NodeKind::Program);
  n.set("body", to_list(std::move(body)));
  n.set("sourceType", Scalar(std::string("script")));
  return n;
}

AstNode expression_statement(AstNode expression) {
  AstNode n(NodeKind::ExpressionStatement);
  n.set("expression", Box<AstNode>(std::move(expression)));
  return n;
}

AstNode block(std::vector<AstNode> body) {
  AstNode n(NodeKind::BlockStatement);
  n.set("body", to_list(std::move(body)));
  return n;
}

AstNode var_declaration(std::string kind, std::string name, std::optional<AstNode> init) {
  AstNode decl(NodeKind::VariableDeclarator);
  decl.set("id", Box<AstNode>(identifier(std::move(name))));
  if (init) decl.set("init", Box<AstNode>(std::move(*init)));
  AstNode n(NodeKind::VariableDeclaration);
  NodeList list;
  list.emplace_back(std::move(decl));
  n.set("declarations", std::move(list));
  n.set("kind", Scalar(std::move(kind)));
  return n;
}

AstNode binary(std::string op, AstNode left, AstNode right) {
  AstNode n(NodeKind::BinaryExpression);
  n.set("operator", Scalar(std::move(op)));
  n.set("left", Box<AstNode>(std::move(left)));
  n.set("right", Box<AstNode>(std::move(right)));
  return n;
}

AstNode assign(std::string op, AstNode left, AstNode right) {
  AstNode n(NodeKind::AssignmentExpression);
  n.set("operator", Scalar(std::move(op)));
  n.set("left", Box<AstNode>(std::move(left)));
  n.set("right", Box<AstNode>(std::move(right)));
  return n;
}

AstNode member(AstNode object, AstNode property, bool computed) {
  AstNode n(NodeKind::MemberExpression);
  n.set("object", Box<AstNode>(std::move(object)));
  n.set("property", Box<AstNode>(std::move(property)));
  n.set("computed", Scalar(computed));
  return n;
}

AstNode call(AstNode callee, std::vector<AstNode> arguments) {
  AstNode n(NodeKind::CallExpression);
  n.set("callee", Box<AstNode>(std::move(callee)));
  n.set("arguments", to_list(std::move(arguments)));
  return n;
}

AstNode array(std::vector<AstNode> elements) {
  AstNode n(NodeKind::ArrayExpression);
  n.set("elements", to_list(std::move(elements)));
  return n;
}

AstNode object() { return AstNode(NodeKind::ObjectExpression); }

AstNode function_expression(std::vector<AstNode> body) {
  AstNode n(NodeKind::FunctionExpression);
  n.set("body", Box<AstNode>(block(std::move(body))));
  n.set("generator", Scalar(false));
  n.set("async", Scalar(false));
  return n;
}

}  // namespace fraggen::estree::build
