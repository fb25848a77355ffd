#pragma once

#include <array>
#include <cstddef>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "fraggen/estree/ast.hpp"
#include "fraggen/fragmenter/vocabulary.hpp"
#include "fraggen/nnlm/hyperparams.hpp"

namespace fraggen::nnlm {

using fragmenter::FragmentId;

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

inline constexpr std::size_t kTensorCount = 6;
inline constexpr std::array<std::string_view, kTensorCount> kTensorNames = {
    "embedding", "type_embedding", "lstm_w", "lstm_b", "out_w", "out_b"};

// All trainable tensors. Columns of `embedding` are fragment vectors (used
// both for the input and for parent conditioning); LSTM gates are stacked
// i, f, g, o; the output layer reads [h; type; parent].
template <typename T>
struct Params {
  Mat<T> embedding;       // D x V
  Mat<T> type_embedding;  // Dt x K
  Mat<T> lstm_w;          // 4H x (D + H)
  Mat<T> lstm_b;          // 4H x 1
  Mat<T> out_w;           // V x (H + Dt + D)
  Mat<T> out_b;           // V x 1

  std::array<Mat<T>*, kTensorCount> tensors() {
    return {&embedding, &type_embedding, &lstm_w, &lstm_b, &out_w, &out_b};
  }
  std::array<const Mat<T>*, kTensorCount> tensors() const {
    return {&embedding, &type_embedding, &lstm_w, &lstm_b, &out_w, &out_b};
  }

  // Same shapes, all zeros.
  Params zeros_like() const;
  bool all_finite() const;
  friend bool operator==(const Params& a, const Params& b) {
    auto x = a.tensors();
    auto y = b.tensors();
    for (std::size_t i = 0; i < kTensorCount; ++i) {
      if (x[i]->rows() != y[i]->rows() || x[i]->cols() != y[i]->cols() || *x[i] != *y[i]) {
        return false;
      }
    }
    return true;
  }
};

template <typename T>
struct LstmState {
  Vec<T> h;
  Vec<T> c;
};

template <typename T>
class BasicModel {
 public:
  // Zero-initialized. Throws InvalidHyperparams.
  BasicModel(const Hyperparams& hp, std::size_t vocab_size);

  const Hyperparams& hyperparams() const { return hp_; }
  std::size_t vocab_size() const { return vocab_size_; }

  Params<T>& params() { return params_; }
  const Params<T>& params() const { return params_; }
  Params<T>& velocity() { return velocity_; }
  const Params<T>& velocity() const { return velocity_; }

  LstmState<T> initial_state() const;
  // Consumes one input fragment. Throws VocabRangeError.
  void advance(LstmState<T>& state, FragmentId id) const;
  // Next-fragment distribution given the state after the context.
  Vec<T> predict(const LstmState<T>& state, estree::NodeKind next_type, FragmentId parent) const;
  // Runs the context from a fresh state, then predicts.
  Vec<T> forward(const std::vector<FragmentId>& context, estree::NodeKind next_type,
                 FragmentId parent) const;

  template <typename U>
  BasicModel<U> cast() const {
    BasicModel<U> out(hp_, vocab_size_);
    auto src = params_.tensors();
    auto dst = out.params().tensors();
    for (std::size_t i = 0; i < kTensorCount; ++i) *dst[i] = src[i]->template cast<U>();
    return out;
  }

 private:
  void check_id(FragmentId id) const;

  Hyperparams hp_;
  std::size_t vocab_size_;
  Params<T> params_;
  Params<T> velocity_;  // momentum buffers
};

using Model = BasicModel<float>;

// Uniform in [-init_scale, init_scale] from hp.seed; deterministic.
template <typename T>
BasicModel<T> init_model(const Hyperparams& hp, std::size_t vocab_size);

inline Model init_model(const Hyperparams& hp, const fragmenter::Vocabulary& vocab) {
  return init_model<float>(hp, vocab.size());
}

}  // namespace fraggen::nnlm
