#include "fraggen/nnlm/hyperparams.hpp"

#include <cmath>

#include "fraggen/errors.hpp"

namespace fraggen::nnlm {

void Hyperparams::validate() const {
  auto fail = [](const char* what) { throw InvalidHyperparams(what); };
  if (embed_dim == 0 || hidden_dim == 0 || type_embed_dim == 0) fail("dimensions must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) fail("momentum must lie in [0, 1)");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) fail("learning rate must be >= 0");
  if (!(lr_decay > 0.0)) fail("lr decay must be positive");
  if (!(l2_penalty >= 0.0)) fail("l2 penalty must be >= 0");
  if (batch_size == 0 || bptt == 0) fail("batch size and bptt must be positive");
  if (!(grad_clip > 0.0)) fail("gradient clip norm must be positive");
  if (!(init_scale >= 0.0)) fail("init scale must be >= 0");
}

void to_json(nlohmann::json& j, const Hyperparams& hp) {
  j = {{"embed_dim", hp.embed_dim},
       {"hidden_dim", hp.hidden_dim},
       {"type_embed_dim", hp.type_embed_dim},
       {"learning_rate", hp.learning_rate},
       {"lr_decay", hp.lr_decay},
       {"momentum", hp.momentum},
       {"l2_penalty", hp.l2_penalty},
       {"batch_size", hp.batch_size},
       {"bptt", hp.bptt},
       {"grad_clip", hp.grad_clip},
       {"epochs", hp.epochs},
       {"seed", hp.seed},
       {"init_scale", hp.init_scale}};
}

void from_json(const nlohmann::json& j, Hyperparams& hp) {
  Hyperparams d;
  hp.embed_dim = j.value("embed_dim", d.embed_dim);
  hp.hidden_dim = j.value("hidden_dim", d.hidden_dim);
  hp.type_embed_dim = j.value("type_embed_dim", d.type_embed_dim);
  hp.learning_rate = j.value("learning_rate", d.learning_rate);
  hp.lr_decay = j.value("lr_decay", d.lr_decay);
  hp.momentum = j.value("momentum", d.momentum);
  hp.l2_penalty = j.value("l2_penalty", d.l2_penalty);
  hp.batch_size = j.value("batch_size", d.batch_size);
  hp.bptt = j.value("bptt", d.bptt);
  hp.grad_clip = j.value("grad_clip", d.grad_clip);
  hp.epochs = j.value("epochs", d.epochs);
  hp.seed = j.value("seed", d.seed);
  hp.init_scale = j.value("init_scale", d.init_scale);
}

}  // namespace fraggen::nnlm
