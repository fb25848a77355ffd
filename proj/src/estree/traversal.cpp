#include "fraggen/estree/traversal.hpp"

namespace fraggen::estree {
namespace {

template <typename Node, typename Out>
void collect(Node& node, Out& out) {
  out.push_back(&node);
  for (auto& s : node.slots()) {
    if (auto* box = std::get_if<Box<AstNode>>(&s)) {
      if (*box) collect(**box, out);
    } else if (auto* list = std::get_if<NodeList>(&s)) {
      for (auto& item : *list) {
        if (item) collect(*item, out);
      }
    }
  }
}

void walk_impl(const AstNode& node, const Edge& edge,
               const std::function<bool(const AstNode&, const Edge&)>& fn) {
  if (!fn(node, edge)) return;
  const auto slots = node.slots();
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (const auto* box = std::get_if<Box<AstNode>>(&slots[i])) {
      if (*box) walk_impl(**box, Edge{&node, i}, fn);
    } else if (const auto* list = std::get_if<NodeList>(&slots[i])) {
      for (std::size_t j = 0; j < list->size(); ++j) {
        if ((*list)[j]) walk_impl(*(*list)[j], Edge{&node, i, j}, fn);
      }
    }
  }
}

}  // namespace

std::vector<const AstNode*> preorder(const AstNode& root) {
  std::vector<const AstNode*> out;
  collect(root, out);
  return out;
}

std::vector<AstNode*> preorder_mut(AstNode& root) {
  std::vector<AstNode*> out;
  collect(root, out);
  return out;
}

void walk(const AstNode& root,
          const std::function<bool(const AstNode& node, const Edge& edge)>& fn) {
  walk_impl(root, Edge{}, fn);
}

std::string_view slot_name(const Edge& edge) {
  if (!edge.parent) return {};
  return spec(edge.parent->kind()).slots[edge.slot].name;
}

}  // namespace fraggen::estree
