#include "fraggen/nnlm/model.hpp"

#include <random>

#include "fraggen/errors.hpp"
#include "nnlm/kernels.hpp"

namespace fraggen::nnlm {

template <typename T>
Params<T> Params<T>::zeros_like() const {
  Params out;
  auto src = tensors();
  auto dst = out.tensors();
  for (std::size_t i = 0; i < kTensorCount; ++i) {
    *dst[i] = Mat<T>::Zero(src[i]->rows(), src[i]->cols());
  }
  return out;
}

template <typename T>
bool Params<T>::all_finite() const {
  for (const auto* t : tensors()) {
    if (!t->allFinite()) return false;
  }
  return true;
}

template <typename T>
BasicModel<T>::BasicModel(const Hyperparams& hp, std::size_t vocab_size)
    : hp_(hp), vocab_size_(vocab_size) {
  hp_.validate();
  if (vocab_size == 0) throw InvalidHyperparams("vocabulary is empty");
  const auto d = static_cast<Eigen::Index>(hp.embed_dim);
  const auto h = static_cast<Eigen::Index>(hp.hidden_dim);
  const auto dt = static_cast<Eigen::Index>(hp.type_embed_dim);
  const auto v = static_cast<Eigen::Index>(vocab_size);
  const auto k = static_cast<Eigen::Index>(estree::kNodeKindCount);
  params_.embedding = Mat<T>::Zero(d, v);
  params_.type_embedding = Mat<T>::Zero(dt, k);
  params_.lstm_w = Mat<T>::Zero(4 * h, d + h);
  params_.lstm_b = Mat<T>::Zero(4 * h, 1);
  params_.out_w = Mat<T>::Zero(v, h + dt + d);
  params_.out_b = Mat<T>::Zero(v, 1);
  velocity_ = params_.zeros_like();
}

template <typename T>
void BasicModel<T>::check_id(FragmentId id) const {
  if (id >= vocab_size_) {
    throw VocabRangeError("fragment id " + std::to_string(id) + " outside vocabulary of " +
                          std::to_string(vocab_size_));
  }
}

template <typename T>
LstmState<T> BasicModel<T>::initial_state() const {
  const auto h = static_cast<Eigen::Index>(hp_.hidden_dim);
  return {Vec<T>::Zero(h), Vec<T>::Zero(h)};
}

template <typename T>
void BasicModel<T>::advance(LstmState<T>& state, FragmentId id) const {
  check_id(id);
  const auto hd = static_cast<Eigen::Index>(hp_.hidden_dim);
  const auto d = static_cast<Eigen::Index>(hp_.embed_dim);
  Vec<T> xh(d + hd);
  xh << params_.embedding.col(id), state.h;
  Vec<T> z = params_.lstm_w * xh + params_.lstm_b;
  Vec<T> i = kernels::sigmoid<T>(z.segment(0, hd));
  Vec<T> f = kernels::sigmoid<T>(z.segment(hd, hd));
  Vec<T> g = z.segment(2 * hd, hd).array().tanh().matrix();
  Vec<T> o = kernels::sigmoid<T>(z.segment(3 * hd, hd));
  state.c = f.cwiseProduct(state.c) + i.cwiseProduct(g);
  state.h = o.cwiseProduct(state.c.array().tanh().matrix());
}

template <typename T>
Vec<T> BasicModel<T>::predict(const LstmState<T>& state, estree::NodeKind next_type,
                              FragmentId parent) const {
  check_id(parent);
  const auto hd = static_cast<Eigen::Index>(hp_.hidden_dim);
  const auto d = static_cast<Eigen::Index>(hp_.embed_dim);
  const auto dt = static_cast<Eigen::Index>(hp_.type_embed_dim);
  Vec<T> u(hd + dt + d);
  u << state.h, params_.type_embedding.col(static_cast<Eigen::Index>(estree::index_of(next_type))),
      params_.embedding.col(parent);
  Vec<double> logits = (params_.out_w * u + params_.out_b).template cast<double>();
  logits.array() -= logits.maxCoeff();
  Vec<double> p = logits.array().exp().matrix();
  p /= p.sum();
  return p.template cast<T>();
}

template <typename T>
Vec<T> BasicModel<T>::forward(const std::vector<FragmentId>& context, estree::NodeKind next_type,
                              FragmentId parent) const {
  auto state = initial_state();
  for (auto id : context) advance(state, id);
  return predict(state, next_type, parent);
}

template <typename T>
BasicModel<T> init_model(const Hyperparams& hp, std::size_t vocab_size) {
  BasicModel<T> model(hp, vocab_size);
  std::mt19937_64 rng(hp.seed);
  std::uniform_real_distribution<double> dist(-hp.init_scale, hp.init_scale);
  for (auto* t : model.params().tensors()) {
    for (Eigen::Index c = 0; c < t->cols(); ++c) {
      for (Eigen::Index r = 0; r < t->rows(); ++r) (*t)(r, c) = static_cast<T>(dist(rng));
    }
  }
  return model;
}

template struct Params<float>;
template struct Params<double>;
template class BasicModel<float>;
template class BasicModel<double>;
template BasicModel<float> init_model<float>(const Hyperparams&, std::size_t);
template BasicModel<double> init_model<double>(const Hyperparams&, std::size_t);

}  // namespace fraggen::nnlm
