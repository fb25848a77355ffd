#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "fraggen/estree/ast.hpp"
#include "fraggen/normalizer/builtins.hpp"

namespace fraggen::normalizer {

struct RenameMap {
  std::map<std::string, std::string> variables;  // x -> v0, v1, ...
  std::map<std::string, std::string> functions;  // g -> f0, f1, ...

  // The normalized name for `original`, or null when it was not renamed.
  const std::string* find(std::string_view original) const;
  std::size_t size() const { return variables.size() + functions.size(); }
};

struct Normalized {
  estree::AstNode ast;
  RenameMap renames;
};

// Renames every declared variable and function (and all their references)
// to v<n> / f<n> in order of first declaration. Builtins, test functions,
// property keys and labels keep their names; numbers already taken by free
// (undeclared) v*/f* names are skipped. Shorthand properties are expanded.
Normalized normalize(const estree::AstNode& ast, const BuiltinRegistry& builtins);

// Parses source text into a Program, or nullopt when it does not parse.
using ParseFn = std::function<std::optional<estree::AstNode>(const std::string& source)>;

inline constexpr int kEvalInlineDepth = 3;

// Replaces `eval("<constant>")` with the parsed code: a lone expression
// replaces the call, several statements replace the enclosing expression
// statement with a block. Evals exposed by inlining are inlined too, up to
// `max_depth` levels.
estree::AstNode inline_eval(const estree::AstNode& ast, const ParseFn& parse,
                            int max_depth = kEvalInlineDepth);

}  // namespace fraggen::normalizer
