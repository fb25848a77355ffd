#pragma once

#include <cstddef>
#include <cstdint>

#include <nlohmann/json.hpp>

namespace fraggen::nnlm {

struct Hyperparams {
  std::size_t embed_dim = 32;
  std::size_t hidden_dim = 32;
  std::size_t type_embed_dim = 8;
  double learning_rate = 0.1;
  double lr_decay = 0.95;  // per epoch
  double momentum = 0.9;
  double l2_penalty = 1e-4;
  std::size_t batch_size = 32;
  std::size_t bptt = 256;
  double grad_clip = 5.0;  // global norm
  std::size_t epochs = 10;
  std::uint64_t seed = 1;
  double init_scale = 0.05;

  // Throws InvalidHyperparams.
  void validate() const;
};

void to_json(nlohmann::json& j, const Hyperparams& hp);
void from_json(const nlohmann::json& j, Hyperparams& hp);

}  // namespace fraggen::nnlm
