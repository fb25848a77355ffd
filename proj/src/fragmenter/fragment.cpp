#include "fraggen/fragmenter/fragment.hpp"

#include <bit>
#include <cstring>

#include "fraggen/errors.hpp"

namespace fraggen::fragmenter {
namespace {

using estree::AstNode;
using estree::Box;
using estree::NodeList;
using estree::Scalar;

Box<AstNode> fragment_child(const AstNode& child) {
  if (is_fragmentizable(child)) return AstNode::make_stub(child.kind());
  return child;
}

void collect(const AstNode& node, std::int32_t parent, FragmentSequence& out) {
  const auto self = static_cast<std::int32_t>(out.fragments.size());
  out.fragments.push_back(make_fragment(node));
  out.parents.push_back(parent);
  for (const auto& s : node.slots()) {
    if (const auto* box = std::get_if<Box<AstNode>>(&s)) {
      if (*box && is_fragmentizable(**box)) collect(**box, self, out);
    } else if (const auto* list = std::get_if<NodeList>(&s)) {
      for (const auto& item : *list) {
        if (item && is_fragmentizable(*item)) collect(*item, self, out);
      }
    }
  }
}

class KeyWriter {
 public:
  void node(const AstNode& n) {
    u8(static_cast<std::uint8_t>(n.kind()));
    u8(n.is_stub() ? 1 : 0);
    u32(static_cast<std::uint32_t>(n.slots().size()));
    for (const auto& s : n.slots()) slot(s);
  }

  std::string take() { return std::move(out_); }

 private:
  void slot(const estree::Slot& s) {
    if (std::holds_alternative<estree::Absent>(s)) {
      u8(0);
    } else if (const auto* box = std::get_if<Box<AstNode>>(&s)) {
      u8(1);
      node(**box);
    } else if (const auto* list = std::get_if<NodeList>(&s)) {
      u8(2);
      u32(static_cast<std::uint32_t>(list->size()));
      for (const auto& item : *list) {
        if (item) {
          u8(1);
          node(*item);
        } else {
          u8(0);
        }
      }
    } else {
      u8(3);
      scalar(std::get<Scalar>(s));
    }
  }

  void scalar(const Scalar& v) {
    u8(static_cast<std::uint8_t>(v.index()));
    std::visit(
        [this](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, bool>) {
            u8(x ? 1 : 0);
          } else if constexpr (std::is_same_v<T, double>) {
            u64(std::bit_cast<std::uint64_t>(x));
          } else if constexpr (std::is_same_v<T, std::string>) {
            str(x);
          } else if constexpr (std::is_same_v<T, estree::Regex>) {
            str(x.pattern);
            str(x.flags);
          }
        },
        v);
  }

  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_ += s;
  }

  std::string out_;
};

// Stubs of `node` in pre-order, pushed so the first one ends on top.
void push_stubs(AstNode& node, std::vector<AstNode*>& stack) {
  std::vector<AstNode*> found;
  for (auto& s : node.slots()) {
    if (auto* box = std::get_if<Box<AstNode>>(&s)) {
      if (*box && (*box)->is_stub()) found.push_back(box->get());
    } else if (auto* list = std::get_if<NodeList>(&s)) {
      for (auto& item : *list) {
        if (item && item->is_stub()) found.push_back(item.get());
      }
    }
  }
  stack.insert(stack.end(), found.rbegin(), found.rend());
}

}  // namespace

bool is_fragmentizable(const AstNode& node) {
  if (node.is_stub()) return false;
  for (const auto& s : node.slots()) {
    if (!std::holds_alternative<estree::Absent>(s)) return true;
  }
  return false;
}

Fragment make_fragment(const AstNode& node) {
  Fragment out(node.kind());
  auto dst = out.slots();
  const auto src = node.slots();
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (const auto* box = std::get_if<Box<AstNode>>(&src[i])) {
      dst[i] = fragment_child(**box);
    } else if (const auto* list = std::get_if<NodeList>(&src[i])) {
      NodeList items;
      items.reserve(list->size());
      for (const auto& item : *list) {
        items.push_back(item ? fragment_child(*item) : Box<AstNode>());
      }
      dst[i] = std::move(items);
    } else {
      dst[i] = src[i];
    }
  }
  return out;
}

FragmentSequence fragmentize(const AstNode& ast, std::string provenance) {
  FragmentSequence out;
  out.provenance = std::move(provenance);
  if (is_fragmentizable(ast)) collect(ast, -1, out);
  return out;
}

std::string canonical_key(const Fragment& fragment) {
  KeyWriter w;
  w.node(fragment);
  return w.take();
}

AstNode reassemble(const std::vector<Fragment>& fragments) {
  if (fragments.empty()) throw ReassemblyArityError("cannot reassemble an empty sequence");
  AstNode root = fragments.front();
  std::vector<AstNode*> stubs;
  push_stubs(root, stubs);
  for (std::size_t i = 1; i < fragments.size(); ++i) {
    if (stubs.empty()) {
      throw ReassemblyArityError(std::to_string(fragments.size() - i) +
                                 " fragments left over with no stub to expand");
    }
    AstNode* target = stubs.back();
    if (target->kind() != fragments[i].kind()) throw ReassemblyTypeError(i);
    stubs.pop_back();
    *target = fragments[i];
    push_stubs(*target, stubs);
  }
  if (!stubs.empty()) {
    throw ReassemblyArityError(std::to_string(stubs.size()) + " stubs left unexpanded");
  }
  return root;
}

}  // namespace fraggen::fragmenter
