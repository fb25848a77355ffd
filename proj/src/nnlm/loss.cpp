#include "fraggen/nnlm/loss.hpp"

#include "fraggen/errors.hpp"
#include "nnlm/kernels.hpp"

namespace fraggen::nnlm {

TargetTypes::TargetTypes(const fragmenter::Vocabulary& vocab) : kind_of(vocab.size(), -1) {
  for (FragmentId id = 1; id < vocab.size(); ++id) {
    kind_of[id] = static_cast<int>(estree::index_of(vocab.kind_of(id)));
  }
  for (std::size_t k = 0; k < estree::kNodeKindCount; ++k) {
    members.push_back(vocab.type_members(static_cast<estree::NodeKind>(k)));
  }
}

TargetTypes::TargetTypes(std::vector<int> kinds)
    : kind_of(std::move(kinds)), members(estree::kNodeKindCount) {
  for (std::size_t id = 0; id < kind_of.size(); ++id) {
    const int k = kind_of[id];
    if (k < 0) continue;
    if (static_cast<std::size_t>(k) >= estree::kNodeKindCount) {
      throw VocabRangeError("kind index out of range");
    }
    members[static_cast<std::size_t>(k)].push_back(static_cast<FragmentId>(id));
  }
}

namespace {

template <typename T>
LossBreakdown loss_impl(const Vec<T>& dist, FragmentId true_id,
                        const fragmenter::Vocabulary& vocab) {
  if (static_cast<std::size_t>(dist.size()) != vocab.size()) {
    throw VocabRangeError("distribution size does not match vocabulary");
  }
  if (true_id >= vocab.size()) throw VocabRangeError("target outside vocabulary");
  if (true_id == fragmenter::kBos) throw ReservedTarget("BOS cannot be a target");
  const auto members = vocab.type_members(vocab.kind_of(true_id));
  std::vector<std::size_t> order;
  return kernels::column_loss<T>(dist.data(), vocab.size(), true_id, members, order, nullptr, 1.0);
}

}  // namespace

LossBreakdown loss(const Vec<double>& dist, FragmentId true_id,
                   const fragmenter::Vocabulary& vocab) {
  return loss_impl(dist, true_id, vocab);
}

LossBreakdown loss(const Vec<float>& dist, FragmentId true_id,
                   const fragmenter::Vocabulary& vocab) {
  return loss_impl(dist, true_id, vocab);
}

}  // namespace fraggen::nnlm
