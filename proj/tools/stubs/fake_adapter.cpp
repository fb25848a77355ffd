// Parser service double: answers parse requests from a snippet index
// (source -> AST file) and print requests with the library printer.
// usage: fraggen-fake-adapter <snippet dir>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "fraggen/errors.hpp"
#include "fraggen/estree/json_codec.hpp"
#include "fraggen/printer/printer.hpp"

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json fail(const nlohmann::json& id, const std::string& kind, const std::string& msg) {
  return {{"id", id}, {"ok", false}, {"error", {{"kind", kind}, {"message", msg}}}};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: " << argv[0] << " <snippet dir>\n";
    return 64;
  }
  const std::filesystem::path dir = argv[1];
  std::map<std::string, std::filesystem::path> by_source;
  const auto index = nlohmann::json::parse(slurp(dir / "index.json"));
  for (const auto& [name, entry] : index.items()) {
    if (entry.value("parses", false)) {
      by_source[entry["source"].get<std::string>()] = dir / (name + ".json");
    }
  }
  std::string line;
  while (std::getline(std::cin, line)) {
    nlohmann::json reply;
    nlohmann::json req = nlohmann::json::parse(line, nullptr, false);
    if (req.is_discarded() || !req.is_object() || !req.contains("id") || !req.contains("op")) {
      reply = fail(nullptr, "protocol", "malformed request");
    } else if (req["op"] == "parse" && req.contains("source")) {
      const auto src = req["source"].get<std::string>();
      if (src == "__exit__") return 0;
      auto it = by_source.find(src);
      if (it == by_source.end()) {
        reply = fail(req["id"], "syntax", "Unexpected token");
        reply["error"]["line"] = 1;
        reply["error"]["col"] = 0;
      } else {
        reply = {{"id", req["id"]}, {"ok", true}, {"ast", nlohmann::json::parse(slurp(it->second))}};
      }
    } else if (req["op"] == "print" && req.contains("ast")) {
      try {
        reply = {{"id", req["id"]},
                 {"ok", true},
                 {"source", fraggen::printer::print_program(
                                fraggen::estree::decode_ast_json(req["ast"]))}};
      } catch (const fraggen::Error& e) {
        reply = fail(req["id"], "unsupported", e.what());
      }
    } else {
      reply = fail(req["id"], "protocol", "unknown op");
    }
    std::cout << reply.dump() << '\n' << std::flush;
  }
  return 0;
}
