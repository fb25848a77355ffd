#include "fraggen/estree/json_codec.hpp"

#include <string>

#include "fraggen/errors.hpp"

namespace fraggen::estree {
namespace {

using nlohmann::json;

constexpr std::string_view kStubKey = "$stub";

// Resolves a dotted schema key ("value.raw") inside an object.
const json* lookup(const json& obj, std::string_view key) {
  const json* cur = &obj;
  while (true) {
    auto dot = key.find('.');
    auto head = key.substr(0, dot);
    if (!cur->is_object()) return nullptr;
    auto it = cur->find(head);
    if (it == cur->end()) return nullptr;
    cur = &*it;
    if (dot == std::string_view::npos) return cur;
    key.remove_prefix(dot + 1);
  }
}

void store(json& obj, std::string_view key, json value) {
  json* cur = &obj;
  while (true) {
    auto dot = key.find('.');
    std::string head(key.substr(0, dot));
    if (dot == std::string_view::npos) {
      (*cur)[head] = std::move(value);
      return;
    }
    cur = &(*cur)[head];
    key.remove_prefix(dot + 1);
  }
}

class Decoder {
 public:
  explicit Decoder(CodecOptions options) : options_(options) {}

  AstNode node(const json& j, const std::string& path) {
    if (!j.is_object()) throw MalformedAst(path, "expected a node object");
    auto type = j.find("type");
    if (type == j.end() || !type->is_string()) {
      throw MalformedAst(path, "missing string 'type'");
    }
    const auto& type_name = type->get_ref<const std::string&>();
    auto kind = kind_from_name(type_name);
    if (!kind) throw UnsupportedKind(type_name);

    if (auto stub = j.find(kStubKey); stub != j.end() && stub->is_boolean() && stub->get<bool>()) {
      if (!options_.allow_stubs) throw MalformedAst(path, "stub outside fragment store");
      return AstNode::make_stub(*kind);
    }

    AstNode out(*kind);
    const auto schema = spec(*kind).slots;
    for (std::size_t i = 0; i < schema.size(); ++i) {
      const auto& slot = schema[i];
      const std::string slot_path = path + "." + std::string(slot.name);
      const json* v = lookup(j, slot.name);
      switch (slot.arity) {
        case Arity::One:
          if (!v || v->is_null()) throw MalformedAst(slot_path, "required child missing");
          out.slots()[i] = Box<AstNode>(node(*v, slot_path));
          break;
        case Arity::Optional:
          if (v && !v->is_null()) out.slots()[i] = Box<AstNode>(node(*v, slot_path));
          break;
        case Arity::List: {
          if (!v || !v->is_array()) throw MalformedAst(slot_path, "expected an array");
          NodeList list;
          list.reserve(v->size());
          for (std::size_t k = 0; k < v->size(); ++k) {
            const auto& item = (*v)[k];
            if (item.is_null()) {
              list.emplace_back();
            } else {
              list.emplace_back(node(item, slot_path + "[" + std::to_string(k) + "]"));
            }
          }
          out.slots()[i] = std::move(list);
          break;
        }
        case Arity::Value:
          if (*kind == NodeKind::Literal && slot.name == "value") {
            out.slots()[i] = literal_value(j, v, slot_path);
          } else if (v) {
            out.slots()[i] = scalar(*v, slot_path);
          }
          break;
      }
    }
    return out;
  }

 private:
  static Scalar scalar(const json& v, const std::string& path) {
    if (v.is_null()) return nullptr;
    if (v.is_boolean()) return v.get<bool>();
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return v.get<std::string>();
    throw MalformedAst(path, "expected a scalar value");
  }

  static Slot literal_value(const json& node, const json* v, const std::string& path) {
    if (auto re = node.find("regex"); re != node.end() && re->is_object()) {
      auto pattern = re->find("pattern");
      auto flags = re->find("flags");
      if (pattern == re->end() || !pattern->is_string() || flags == re->end() ||
          !flags->is_string()) {
        throw MalformedAst(path, "regex literal needs string pattern and flags");
      }
      return Scalar(Regex{pattern->get<std::string>(), flags->get<std::string>()});
    }
    if (node.contains("bigint")) throw MalformedAst(path, "BigInt literals are unsupported");
    if (!v) return Absent{};
    return scalar(*v, path);
  }

  CodecOptions options_;
};

json scalar_json(const Scalar& s) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::nullptr_t>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, Regex>) {
          return json::object();
        } else {
          return v;
        }
      },
      s);
}

json encode(const AstNode& n, const CodecOptions& options) {
  json out = json::object();
  out["type"] = std::string(kind_name(n.kind()));
  if (n.is_stub()) {
    if (!options.allow_stubs) throw IncompleteAst();
    out[std::string(kStubKey)] = true;
    return out;
  }
  const auto schema = spec(n.kind()).slots;
  const auto slots = n.slots();
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const auto& s = slots[i];
    const auto key = schema[i].name;
    if (std::holds_alternative<Absent>(s)) {
      if (schema[i].arity == Arity::Optional) store(out, key, nullptr);
      continue;
    }
    if (const auto* box = std::get_if<Box<AstNode>>(&s)) {
      store(out, key, encode(**box, options));
    } else if (const auto* list = std::get_if<NodeList>(&s)) {
      json arr = json::array();
      for (const auto& item : *list) {
        arr.push_back(item ? encode(*item, options) : json(nullptr));
      }
      store(out, key, std::move(arr));
    } else if (const auto* v = std::get_if<Scalar>(&s)) {
      store(out, key, scalar_json(*v));
      if (const auto* re = std::get_if<Regex>(v)) {
        out["regex"] = {{"pattern", re->pattern}, {"flags", re->flags}};
      }
    }
  }
  return out;
}

}  // namespace

AstNode decode_ast(std::string_view json_text, CodecOptions options) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw MalformedAst("$", e.what());
  }
  return decode_ast_json(j, options);
}

AstNode decode_ast_json(const nlohmann::json& json, CodecOptions options) {
  return Decoder(options).node(json, "$");
}

std::string encode_ast(const AstNode& ast, CodecOptions options) {
  return encode_ast_json(ast, options).dump();
}

nlohmann::json encode_ast_json(const AstNode& ast, CodecOptions options) {
  return encode(ast, options);
}

}  // namespace fraggen::estree
