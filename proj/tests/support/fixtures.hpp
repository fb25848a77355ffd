#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <map>
#include <optional>

#include <nlohmann/json.hpp>

#include "fraggen/estree/json_codec.hpp"

namespace fraggen::testing {

inline std::filesystem::path fixture_dir(const std::string& sub) {
  return std::filesystem::path(FRAGGEN_FIXTURE_DIR) / sub;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<std::filesystem::path> fixture_files(const std::string& sub) {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(fixture_dir(sub))) {
    if (e.path().extension() == ".json") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<estree::AstNode> load_fixtures(const std::string& sub,
                                                   std::size_t limit = static_cast<std::size_t>(-1)) {
  std::vector<estree::AstNode> out;
  for (const auto& p : fixture_files(sub)) {
    if (out.size() >= limit) break;
    out.push_back(estree::decode_ast(read_file(p)));
  }
  return out;
}

inline estree::AstNode snippet(const std::string& name) {
  return estree::decode_ast(read_file(fixture_dir("snippets") / (name + ".json")));
}

// Stands in for the parser adapter: parses exactly the snippet sources.
inline std::function<std::optional<estree::AstNode>(const std::string&)> snippet_parser() {
  auto index = nlohmann::json::parse(read_file(fixture_dir("snippets") / "index.json"));
  std::map<std::string, std::string> by_source;
  for (const auto& [name, entry] : index.items()) {
    if (entry["parses"].get<bool>()) by_source[entry["source"].get<std::string>()] = name;
  }
  return [by_source](const std::string& source) -> std::optional<estree::AstNode> {
    auto it = by_source.find(source);
    if (it == by_source.end()) return std::nullopt;
    return snippet(it->second);
  };
}

}  // namespace fraggen::testing
