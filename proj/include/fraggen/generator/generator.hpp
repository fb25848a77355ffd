#pragma once

#include <cstddef>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "fraggen/estree/ast.hpp"
#include "fraggen/fragmenter/fragment.hpp"
#include "fraggen/fragmenter/vocabulary.hpp"
#include "fraggen/suggest/suggester.hpp"

namespace fraggen::generator {

using fragmenter::FragmentId;
using suggest::Rng;

struct GenerationParams {
  std::size_t f_max = 100;
  std::size_t k_top = 64;
  std::size_t retry_bound = 0;  // draws per pick; 0 means 2 * k_top

  std::size_t retries() const { return retry_bound ? retry_bound : 2 * k_top; }
  // Throws ConfigError.
  void validate() const;
};

// A seed with its fragment sequence encoded against the vocabulary.
struct Seed {
  estree::AstNode ast{estree::NodeKind::Program};
  fragmenter::EncodedSequence encoded;
};

Seed make_seed(estree::AstNode ast, const fragmenter::Vocabulary& vocab);

struct Pruned {
  estree::AstNode ast{estree::NodeKind::Program};  // one stub where the subtree was
  std::vector<FragmentId> context;      // BOS + ids before the removed fragment
  std::size_t position = 0;             // removed fragment's pre-order index
  std::size_t removed_count = 0;        // fragments in the removed subtree
  FragmentId parent = fragmenter::kBos; // id of the fragment holding the stub
  std::vector<fragmenter::Fragment> removed;  // the subtree's fragments
};

// Uniform over fragmentizable non-root nodes. Throws NothingToRemove.
Pruned remove_subtree(const Seed& seed, Rng& rng);
Pruned remove_subtree_at(const Seed& seed, std::size_t position);

// Expands the first pre-order stub. Throws AppendTypeError, NothingToAppend.
void append_frag(estree::AstNode& ast, const fragmenter::Fragment& frag);

bool is_ast_broken(const estree::AstNode& ast);

enum class Failure { NoTypedSuggestion, BudgetExhausted };
std::string_view to_string(Failure f);

struct Mutation {
  estree::AstNode ast{estree::NodeKind::Program};
  std::size_t seed_index = 0;
  std::size_t position = 0;
  std::vector<FragmentId> appended;
};

struct MutateResult {
  std::optional<Mutation> mutation;
  Failure failure = Failure::BudgetExhausted;  // meaningful when !mutation
  explicit operator bool() const { return mutation.has_value(); }
};

// Algorithm: pick a seed, prune one subtree, then grow it back from the
// suggester until no stub remains or f_max fragments were appended.
MutateResult mutate_ast(const std::vector<Seed>& seeds, const suggest::Suggester& suggester,
                        const fragmenter::Vocabulary& vocab, const GenerationParams& params,
                        Rng& rng);
// Same, on an already pruned seed.
MutateResult regrow(Pruned pruned, const suggest::Suggester& suggester,
                    const fragmenter::Vocabulary& vocab, const GenerationParams& params, Rng& rng);

}  // namespace fraggen::generator
