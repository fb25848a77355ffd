#include "fraggen/normalizer/builtins.hpp"

#include <fstream>

#include "fraggen/errors.hpp"

namespace fraggen::normalizer {
namespace {

void read_names(const nlohmann::json& doc, const char* key,
                std::set<std::string, std::less<>>& out) {
  auto it = doc.find(key);
  if (it == doc.end()) return;
  if (!it->is_array()) throw ConfigError(std::string("builtins: '") + key + "' must be an array");
  for (const auto& n : *it) {
    if (!n.is_string()) throw ConfigError(std::string("builtins: '") + key + "' holds a non-string");
    auto name = n.get<std::string>();
    if (is_normalized_name(name)) {
      throw ConfigError("builtins: '" + name + "' collides with normalized names");
    }
    out.insert(std::move(name));
  }
}

}  // namespace

bool is_normalized_name(std::string_view name) {
  if (name.size() < 2 || (name[0] != 'v' && name[0] != 'f')) return false;
  for (std::size_t i = 1; i < name.size(); ++i) {
    if (name[i] < '0' || name[i] > '9') return false;
  }
  return true;
}

BuiltinRegistry BuiltinRegistry::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("builtins: document must be an object");
  BuiltinRegistry reg;
  read_names(doc, "names", reg.names_);
  read_names(doc, "test_functions", reg.test_functions_);
  if (auto it = doc.find("types"); it != doc.end()) {
    if (!it->is_object()) throw ConfigError("builtins: 'types' must be an object");
    for (const auto& [name, type] : it->items()) {
      auto parsed = type.is_string() ? parse_js_type(type.get<std::string>()) : std::nullopt;
      if (!parsed) throw ConfigError("builtins: bad type for '" + name + "'");
      reg.types_[name] = *parsed;
    }
  }
  return reg;
}

BuiltinRegistry BuiltinRegistry::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open builtins file " + file.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("builtins file " + file.string() + ": " + e.what());
  }
  return from_json(doc);
}

std::filesystem::path BuiltinRegistry::default_data_dir() {
  if (const char* env = std::getenv("FRAGGEN_DATA_DIR")) return env;
  return FRAGGEN_DATA_DIR;
}

BuiltinRegistry BuiltinRegistry::for_engine(std::string_view engine,
                                            const std::filesystem::path& data_dir) {
  auto dir = data_dir / "builtins";
  auto reg = load(dir / "ecmascript.json");
  if (!engine.empty() && engine != "ecmascript") {
    reg.merge(load(dir / (std::string(engine) + ".json")));
  }
  return reg;
}

void BuiltinRegistry::merge(const BuiltinRegistry& other) {
  names_.insert(other.names_.begin(), other.names_.end());
  test_functions_.insert(other.test_functions_.begin(), other.test_functions_.end());
  for (const auto& [k, v] : other.types_) types_[k] = v;
}

bool BuiltinRegistry::contains(std::string_view name) const {
  return names_.contains(name) || test_functions_.contains(name);
}

bool BuiltinRegistry::is_test_function(std::string_view name) const {
  return test_functions_.contains(name);
}

std::optional<JsType> BuiltinRegistry::type_of(std::string_view name) const {
  if (auto it = types_.find(name); it != types_.end()) return it->second;
  if (test_functions_.contains(name)) return JsType::Function;
  if (names_.contains(name)) return JsType::Unknown;
  return std::nullopt;
}

}  // namespace fraggen::normalizer
