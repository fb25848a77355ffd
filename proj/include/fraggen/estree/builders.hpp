#pragma once

#include <initializer_list>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fraggen/estree/ast.hpp"

// Small constructors for hand-built trees (tests, resolver fallbacks).
namespace fraggen::estree::build {

AstNode identifier(std::string name);
AstNode number(double value);
AstNode string(std::string value);
AstNode boolean(bool value);
AstNode null_literal();
AstNode regex(std::string pattern, std::string flags);

AstNode program(std::vector<AstNode> body);
AstNode expression_statement(AstNode expression);
AstNode block(std::vector<AstNode> body);
AstNode var_declaration(std::string kind, std::string name, std::optional<AstNode> init);
AstNode binary(std::string op, AstNode left, AstNode right);
AstNode assign(std::string op, AstNode left, AstNode right);
AstNode member(AstNode object, AstNode property, bool computed);
AstNode call(AstNode callee, std::vector<AstNode> arguments);
AstNode array(std::vector<AstNode> elements);
AstNode object();
AstNode function_expression(std::vector<AstNode> body);

NodeList to_list(std::vector<AstNode> nodes);

}  // namespace fraggen::estree::build
