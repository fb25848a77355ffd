#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace fraggen {

// The static type lattice used by the resolver. Flat: no subtyping.
enum class JsType : std::uint8_t {
  Array,
  Boolean,
  Function,
  Null,
  Number,
  Object,
  Regex,
  String,
  Undefined,
  Unknown,
};

inline constexpr std::size_t kJsTypeCount = 10;

std::string_view to_string(JsType type);
std::optional<JsType> parse_js_type(std::string_view name);

}  // namespace fraggen
