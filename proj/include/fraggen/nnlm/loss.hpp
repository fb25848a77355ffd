#pragma once

#include <vector>

#include "fraggen/fragmenter/vocabulary.hpp"
#include "fraggen/nnlm/model.hpp"

namespace fraggen::nnlm {

// Floor applied to the true-class probability inside l1.
inline constexpr double kLogClamp = 1e-12;

struct LossBreakdown {
  double l1 = 0.0;  // cross-entropy, nats
  double l2 = 0.0;  // type error, in [0, 1]
};

// Root kind of every id (-1 for BOS) and, per kind, the id set that l2
// counts as same-type.
struct TargetTypes {
  std::vector<int> kind_of;
  std::vector<std::vector<FragmentId>> members;

  explicit TargetTypes(const fragmenter::Vocabulary& vocab);
  // For models not backed by a Vocabulary: kinds[i] is the kind index of id
  // i, or -1 for ids that are never targets.
  explicit TargetTypes(std::vector<int> kinds);
};

// l1 = -log dist[y]; l2 = mass of the top n entries minus the mass of y's
// kind, n being the size of that kind's id set. Throws ReservedTarget for
// BOS and VocabRangeError when sizes disagree.
LossBreakdown loss(const Vec<double>& dist, FragmentId true_id,
                   const fragmenter::Vocabulary& vocab);
LossBreakdown loss(const Vec<float>& dist, FragmentId true_id,
                   const fragmenter::Vocabulary& vocab);

}  // namespace fraggen::nnlm
