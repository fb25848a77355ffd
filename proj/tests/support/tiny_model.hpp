#pragma once

#include <algorithm>
#include <functional>
#include <random>
#include <vector>

#include "fraggen/nnlm/loss.hpp"
#include "fraggen/nnlm/model.hpp"
#include "fraggen/nnlm/train.hpp"

namespace fraggen::testing {

// Random model with |V| <= 30 and dims <= 8 plus a handful of random
// sequences over it. Id 0 plays BOS; the others get random kinds.
struct TinyCase {
  nnlm::BasicModel<double> model;
  std::vector<fragmenter::EncodedSequence> sample;
  nnlm::TargetTypes types;
};

// Smallest gap, over every prediction step, between the n-th and (n+1)-th
// largest probability. l2 has a kink wherever that gap is zero.
inline double top_n_margin(const TinyCase& c) {
  double margin = 1.0;
  for (const auto& seq : c.sample) {
    for (std::size_t t = 0; t + 1 < seq.ids.size(); ++t) {
      const auto y = seq.ids[t + 1];
      const int kind = c.types.kind_of[y];
      const std::vector<fragmenter::FragmentId> ctx(seq.ids.begin(), seq.ids.begin() + t + 1);
      auto p = c.model.forward(ctx, static_cast<estree::NodeKind>(kind),
                               seq.ids[static_cast<std::size_t>(seq.parents[t + 1])]);
      std::vector<double> sorted(p.data(), p.data() + p.size());
      std::sort(sorted.begin(), sorted.end(), std::greater<>());
      const std::size_t n = c.types.members[static_cast<std::size_t>(kind)].size();
      if (n < sorted.size()) margin = std::min(margin, sorted[n - 1] - sorted[n]);
    }
  }
  return margin;
}

inline TinyCase draw_tiny_case(std::mt19937_64& rng, std::uint64_t seed) {
  auto pick = [&](std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
  };
  nnlm::Hyperparams hp;
  hp.embed_dim = pick(2, 8);
  hp.hidden_dim = pick(2, 8);
  hp.type_embed_dim = pick(2, 8);
  hp.seed = seed;
  hp.init_scale = 0.5;
  const std::size_t v = pick(8, 30);
  std::vector<int> kinds(v, -1);
  for (std::size_t id = 1; id < v; ++id) kinds[id] = static_cast<int>(pick(0, 5));
  std::vector<fragmenter::EncodedSequence> sample;
  for (int s = 0; s < 3; ++s) {
    fragmenter::EncodedSequence seq{"tiny", {0}, {-1}};
    const std::size_t len = pick(4, 10);
    for (std::size_t t = 1; t < len; ++t) {
      seq.ids.push_back(static_cast<fragmenter::FragmentId>(pick(1, v - 1)));
      seq.parents.push_back(t == 1 ? 0 : static_cast<std::int32_t>(pick(1, t - 1)));
    }
    sample.push_back(seq);
  }
  return {nnlm::init_model<double>(hp, v), sample, nnlm::TargetTypes(kinds)};
}

// Redraws until every step is at least 1e-3 away from a top-n tie, so a
// finite difference with eps = 1e-4 stays on one smooth piece.
inline TinyCase make_tiny_case(std::uint64_t seed) {
  std::mt19937_64 rng(seed * 7919 + 1);
  for (;;) {
    auto c = draw_tiny_case(rng, seed);
    if (top_n_margin(c) > 1e-3) return c;
  }
}

}  // namespace fraggen::testing
