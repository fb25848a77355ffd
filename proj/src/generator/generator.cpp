#include "fraggen/generator/generator.hpp"

#include "fraggen/errors.hpp"

namespace fraggen::generator {

using estree::AstNode;
using estree::Box;
using estree::NodeList;

namespace {

void collect_fragmentizable(AstNode& node, std::vector<AstNode*>& out) {
  out.push_back(&node);
  for (auto& s : node.slots()) {
    if (auto* box = std::get_if<Box<AstNode>>(&s)) {
      if (*box && fragmenter::is_fragmentizable(**box)) collect_fragmentizable(**box, out);
    } else if (auto* list = std::get_if<NodeList>(&s)) {
      for (auto& item : *list) {
        if (item && fragmenter::is_fragmentizable(*item)) collect_fragmentizable(*item, out);
      }
    }
  }
}

// Direct stub children of `node`, in pre-order.
std::vector<AstNode*> stubs_of(AstNode& node) {
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
  return found;
}

AstNode* first_stub(AstNode& node) {
  if (node.is_stub()) return &node;
  for (auto& s : node.slots()) {
    if (auto* box = std::get_if<Box<AstNode>>(&s)) {
      if (*box) {
        if (auto* hit = first_stub(**box)) return hit;
      }
    } else if (auto* list = std::get_if<NodeList>(&s)) {
      for (auto& item : *list) {
        if (item) {
          if (auto* hit = first_stub(*item)) return hit;
        }
      }
    }
  }
  return nullptr;
}

}  // namespace

void GenerationParams::validate() const {
  if (f_max == 0) throw ConfigError("f_max must be at least 1");
  if (k_top == 0) throw ConfigError("k_top must be at least 1");
}

Seed make_seed(AstNode ast, const fragmenter::Vocabulary& vocab) {
  auto encoded = fragmenter::encode_sequence(fragmenter::fragmentize(ast), vocab);
  return {std::move(ast), std::move(encoded)};
}

Pruned remove_subtree_at(const Seed& seed, std::size_t position) {
  // encoded.ids has BOS at 0, so fragment i sits at ids[i + 1].
  const auto& ids = seed.encoded.ids;
  const auto& parents = seed.encoded.parents;
  const std::size_t n = ids.size() - 1;
  if (n < 2) throw NothingToRemove();
  if (position == 0 || position >= n) throw NothingToRemove();

  Pruned out;
  out.ast = seed.ast;
  std::vector<AstNode*> nodes;
  collect_fragmentizable(out.ast, nodes);
  if (nodes.size() != n) throw MalformedAst("seed", "fragment count does not match its encoding");

  out.removed = fragmenter::fragmentize(*nodes[position]).fragments;
  out.removed_count = out.removed.size();

  out.position = position;
  out.parent = ids[static_cast<std::size_t>(parents[position + 1])];
  out.context.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(position + 1));
  *nodes[position] = AstNode::make_stub(nodes[position]->kind());
  return out;
}

Pruned remove_subtree(const Seed& seed, Rng& rng) {
  const std::size_t n = seed.encoded.ids.size() - 1;
  if (n < 2) throw NothingToRemove();
  std::uniform_int_distribution<std::size_t> pick(1, n - 1);
  return remove_subtree_at(seed, pick(rng));
}

void append_frag(AstNode& ast, const fragmenter::Fragment& frag) {
  AstNode* target = first_stub(ast);
  if (!target) throw NothingToAppend();
  if (target->kind() != frag.kind()) {
    throw AppendTypeError(std::string("fragment ") + std::string(estree::kind_name(frag.kind())) +
                          " does not fit stub " + std::string(estree::kind_name(target->kind())));
  }
  *target = frag;
}

bool is_ast_broken(const AstNode& ast) { return estree::has_stub(ast); }

std::string_view to_string(Failure f) {
  return f == Failure::NoTypedSuggestion ? "no_typed_suggestion" : "budget_exhausted";
}

MutateResult regrow(Pruned pruned, const suggest::Suggester& suggester,
                    const fragmenter::Vocabulary& vocab, const GenerationParams& params,
                    Rng& rng) {
  MutateResult result;
  Mutation m;
  m.position = pruned.position;
  m.ast = std::move(pruned.ast);

  // Pending stubs with the id of their enclosing fragment; the first
  // pre-order stub is on top.
  struct Pending {
    AstNode* node;
    FragmentId parent;
  };
  std::vector<Pending> stack;
  if (AstNode* s = first_stub(m.ast)) stack.push_back({s, pruned.parent});

  auto session = suggester.start(pruned.context, rng);
  while (!stack.empty()) {
    if (m.appended.size() >= params.f_max) {
      result.failure = Failure::BudgetExhausted;
      return result;
    }
    const Pending top = stack.back();
    const auto kind = top.node->kind();
    const auto candidates = session->suggest(kind, top.parent, params.k_top);
    bool any = false;
    for (const auto& c : candidates) any = any || vocab.kind_of(c.id) == kind;
    if (!any) {
      result.failure = Failure::NoTypedSuggestion;
      return result;
    }
    std::optional<FragmentId> chosen;
    std::uniform_int_distribution<std::size_t> draw(0, candidates.size() - 1);
    for (std::size_t r = 0; r < params.retries() && !chosen; ++r) {
      const auto& c = candidates[draw(rng)];
      if (vocab.kind_of(c.id) == kind) chosen = c.id;
    }
    if (!chosen) {
      result.failure = Failure::BudgetExhausted;
      return result;
    }
    stack.pop_back();
    *top.node = vocab.fragment(*chosen);
    auto fresh = stubs_of(*top.node);
    for (auto it = fresh.rbegin(); it != fresh.rend(); ++it) stack.push_back({*it, *chosen});
    m.appended.push_back(*chosen);
    session->push(*chosen);
  }
  result.mutation = std::move(m);
  return result;
}

MutateResult mutate_ast(const std::vector<Seed>& seeds, const suggest::Suggester& suggester,
                        const fragmenter::Vocabulary& vocab, const GenerationParams& params,
                        Rng& rng) {
  params.validate();
  if (seeds.empty()) throw ConfigError("no seeds");
  std::uniform_int_distribution<std::size_t> pick(0, seeds.size() - 1);
  const std::size_t index = pick(rng);
  auto result = regrow(remove_subtree(seeds[index], rng), suggester, vocab, params, rng);
  if (result.mutation) result.mutation->seed_index = index;
  return result;
}

}  // namespace fraggen::generator
