#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fraggen/estree/ast.hpp"

namespace fraggen::adapter {

struct ParseError {
  std::string kind;  // "syntax", "unsupported", "protocol", ...
  std::string message;
  std::optional<int> line;
  std::optional<int> col;
};

struct ParseResult {
  std::optional<estree::AstNode> ast;
  ParseError error;  // meaningful when !ast
};

// Talks newline-delimited JSON to a parser service over its stdin/stdout:
//   {"id":N,"op":"parse","source":...} -> {"id":N,"ok":true,"ast":...}
//   {"id":N,"op":"print","ast":...}    -> {"id":N,"ok":true,"source":...}
// Failures come back as {"id":N,"ok":false,"error":{kind,message,line?,col?}}.
class Client {
 public:
  // Throws AdapterError when the command cannot be started.
  explicit Client(std::vector<std::string> command);
  ~Client();
  Client(const Client&) = delete;
  Client& operator=(const Client&) = delete;

  // Splits a shell-like command line on whitespace (FRAGGEN_ADAPTER).
  static std::vector<std::string> split_command(const std::string& line);

  // A reply that decodes to an AST outside the registry is reported as an
  // "unsupported" error. Throws AdapterError when the service dies or
  // breaks the protocol.
  ParseResult parse(const std::string& source);
  std::string print(const estree::AstNode& ast);

  nlohmann::json request(nlohmann::json body);

 private:
  std::string read_line();

  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  std::uint64_t next_id_ = 1;
};

}  // namespace fraggen::adapter
