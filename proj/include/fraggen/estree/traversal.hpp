#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "fraggen/estree/ast.hpp"

namespace fraggen::estree {

// Node first, then each slot in schema order, lists left to right.
std::vector<const AstNode*> preorder(const AstNode& root);
std::vector<AstNode*> preorder_mut(AstNode& root);

// Where a node sits inside its parent. `list_index` is npos for single-node
// slots.
struct Edge {
  const AstNode* parent = nullptr;
  std::size_t slot = 0;
  std::size_t list_index = static_cast<std::size_t>(-1);
};

// Pre-order walk reporting each node with its incoming edge (parent is null
// for the root). Returning false from `fn` skips the node's children.
void walk(const AstNode& root,
          const std::function<bool(const AstNode& node, const Edge& edge)>& fn);

// Slot name of an edge, for readable dispatch in analyses.
std::string_view slot_name(const Edge& edge);

}  // namespace fraggen::estree
