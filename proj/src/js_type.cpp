#include "fraggen/js_type.hpp"

#include <array>

namespace fraggen {
namespace {

constexpr std::array<std::string_view, kJsTypeCount> kNames = {
    "array", "boolean", "function", "null", "number",
    "object", "regex", "string", "undefined", "unknown",
};

}  // namespace

std::string_view to_string(JsType type) { return kNames[static_cast<std::size_t>(type)]; }

std::optional<JsType> parse_js_type(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return static_cast<JsType>(i);
  }
  return std::nullopt;
}

}  // namespace fraggen
