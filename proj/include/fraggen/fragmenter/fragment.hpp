#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fraggen/estree/ast.hpp"

namespace fraggen::fragmenter {

// A depth-one subtree. Fragmentizable children are kind-only stubs; childless
// children (every slot absent, e.g. `this`, `break;`) are kept whole since
// there is nothing left to expand.
using Fragment = estree::AstNode;

// A node that yields a fragment of its own: not a stub and at least one
// non-absent slot. An empty list counts as present.
bool is_fragmentizable(const estree::AstNode& node);

Fragment make_fragment(const estree::AstNode& node);

struct FragmentSequence {
  std::vector<Fragment> fragments;       // pre-order
  std::vector<std::int32_t> parents;     // index of the enclosing fragment, -1 for the root
  std::string provenance;
};

// One fragment per fragmentizable node, in pre-order.
FragmentSequence fragmentize(const estree::AstNode& ast, std::string provenance = {});

// Injective, platform-stable byte serialization of a fragment.
std::string canonical_key(const Fragment& fragment);

// Inverse of fragmentize: each fragment expands the first pre-order stub.
// Throws ReassemblyTypeError(position) on a kind mismatch and
// ReassemblyArityError on an empty sequence, leftover fragments or leftover
// stubs.
estree::AstNode reassemble(const std::vector<Fragment>& fragments);

}  // namespace fraggen::fragmenter
