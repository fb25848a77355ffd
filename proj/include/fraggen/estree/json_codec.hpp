#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "fraggen/estree/ast.hpp"

namespace fraggen::estree {

struct CodecOptions {
  // Stubs are written as {"type": K, "$stub": true}. Only the fragment store
  // uses this; ESTree consumers never see stubs.
  bool allow_stubs = false;
};

// Decodes ESTree JSON. Location, range, comments and any other key outside
// the kind's schema are dropped. Throws UnsupportedKind or MalformedAst.
AstNode decode_ast(std::string_view json_text, CodecOptions options = {});
AstNode decode_ast_json(const nlohmann::json& json, CodecOptions options = {});

// Throws IncompleteAst on stubs unless options.allow_stubs.
std::string encode_ast(const AstNode& ast, CodecOptions options = {});
nlohmann::json encode_ast_json(const AstNode& ast, CodecOptions options = {});

}  // namespace fraggen::estree
