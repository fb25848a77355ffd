#pragma once

#include <string>

#include "fraggen/estree/ast.hpp"

namespace fraggen::printer {

// Emits source text for a stub-free tree. Every statement is terminated, and
// a child expression whose precedence does not strictly exceed its parent's
// is parenthesized, so printing never relies on associativity or ASI.
// Throws IncompleteAst when a stub is reached.
std::string print_program(const estree::AstNode& ast);

// Prints any statement or expression node (used for diagnostics and tests).
std::string print_node(const estree::AstNode& node);

}  // namespace fraggen::printer
