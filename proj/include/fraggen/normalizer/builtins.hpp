#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "fraggen/js_type.hpp"

namespace fraggen::normalizer {

// Engine globals and vendor test-harness functions. Neither is ever renamed
// by the normalizer or rewritten by the resolver.
class BuiltinRegistry {
 public:
  BuiltinRegistry() = default;

  // Throws ConfigError on a malformed document or a name that collides with
  // the normalized v*/f* namespace.
  static BuiltinRegistry from_json(const nlohmann::json& doc);
  static BuiltinRegistry load(const std::filesystem::path& file);
  // ecmascript.json plus <engine>.json from the data directory.
  static BuiltinRegistry for_engine(std::string_view engine,
                                    const std::filesystem::path& data_dir = default_data_dir());
  static std::filesystem::path default_data_dir();

  void merge(const BuiltinRegistry& other);

  bool contains(std::string_view name) const;
  bool is_test_function(std::string_view name) const;
  std::optional<JsType> type_of(std::string_view name) const;

  const std::set<std::string, std::less<>>& names() const { return names_; }
  const std::set<std::string, std::less<>>& test_functions() const { return test_functions_; }

 private:
  std::set<std::string, std::less<>> names_;
  std::set<std::string, std::less<>> test_functions_;
  std::map<std::string, JsType, std::less<>> types_;
};

// True for names of the form v<digits> or f<digits>.
bool is_normalized_name(std::string_view name);

}  // namespace fraggen::normalizer
