#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fraggen/fragmenter/vocabulary.hpp"
#include "fraggen/nnlm/loss.hpp"
#include "fraggen/nnlm/model.hpp"

namespace fraggen::nnlm {

using fragmenter::EncodedSequence;

struct EpochStats {
  double mean_l1 = 0.0;
  double mean_l2 = 0.0;
  std::size_t steps = 0;
  double learning_rate = 0.0;
};

// One shuffled pass of minibatch SGD with momentum over `data`. The epoch
// index drives the shuffle and the learning-rate decay. Throws
// DivergedError, ReservedTarget, VocabRangeError.
EpochStats train_epoch(Model& model, const std::vector<EncodedSequence>& data,
                       const TargetTypes& types, std::size_t epoch);
EpochStats train_epoch(Model& model, const std::vector<EncodedSequence>& data,
                       const fragmenter::Vocabulary& vocab, std::size_t epoch);

struct Metrics {
  double mean_l1 = 0.0;
  double mean_l2 = 0.0;
  double accuracy = 0.0;  // top-1 next fragment
  std::size_t steps = 0;

  double perplexity() const;
  double type_error() const { return mean_l2; }
};

// Teacher-forced pass over whole sequences. Throws EmptyDataset.
Metrics evaluate(const Model& model, const std::vector<EncodedSequence>& data,
                 const TargetTypes& types);
Metrics evaluate(const Model& model, const std::vector<EncodedSequence>& data,
                 const fragmenter::Vocabulary& vocab);

double perplexity(const Model& model, const std::vector<EncodedSequence>& data,
                  const fragmenter::Vocabulary& vocab);
double type_error(const Model& model, const std::vector<EncodedSequence>& data,
                  const fragmenter::Vocabulary& vocab);

// Mean l1 + l2 over every prediction step of `sample` (one batch, no
// truncation) and, when `grad` is given, its gradient.
template <typename T>
double objective(const BasicModel<T>& model, const std::vector<EncodedSequence>& sample,
                 const TargetTypes& types, Params<T>* grad);

struct GradientReport {
  double max_rel_error = 0.0;
  std::string worst_tensor;
  std::size_t checked = 0;
};

// Central differences against the analytic gradient of `objective` for every
// element of every tensor. Relative error is |a - n| / max(|a| + |n|, 1e-7).
GradientReport check_gradients(const BasicModel<double>& model,
                               const std::vector<EncodedSequence>& sample,
                               const TargetTypes& types, double eps = 1e-4);

}  // namespace fraggen::nnlm
