#pragma once

// Batched LSTM forward/backward shared by training, evaluation and the
// gradient check. Internal to the library.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "fraggen/errors.hpp"
#include "fraggen/fragmenter/vocabulary.hpp"
#include "fraggen/nnlm/loss.hpp"
#include "fraggen/nnlm/model.hpp"

namespace fraggen::nnlm::kernels {

using fragmenter::EncodedSequence;
using fragmenter::Vocabulary;

template <typename T, typename Derived>
Vec<T> sigmoid(const Eigen::MatrixBase<Derived>& z) {
  return (T(1) / (T(1) + (-z.array()).exp())).matrix();
}

template <typename T>
Mat<T> sigmoid_m(const Mat<T>& z) {
  return (T(1) / (T(1) + (-z.array()).exp())).matrix();
}

// l1 + l2 for one distribution column. When `dz` is given, writes
// scale * d(l1 + l2)/d(logits) into it.
template <typename T>
LossBreakdown column_loss(const T* p, std::size_t v, FragmentId y,
                          const std::vector<FragmentId>& members, std::vector<std::size_t>& order,
                          T* dz, double scale) {
  LossBreakdown out;
  const double py = static_cast<double>(p[y]);
  out.l1 = std::max(0.0, -std::log(std::max(py, kLogClamp)));

  const std::size_t n = std::min(members.size(), v);
  order.resize(v);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto by_prob = [p](std::size_t a, std::size_t b) {
    return p[a] > p[b] || (p[a] == p[b] && a < b);
  };
  std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n) - 1, order.end(),
                   by_prob);
  double top = 0.0;
  for (std::size_t i = 0; i < n; ++i) top += static_cast<double>(p[order[i]]);
  double typed = 0.0;
  for (auto m : members) typed += static_cast<double>(p[m]);
  // Rounding can push either sum a few ulp past the true [0, 1] range.
  out.l2 = std::clamp(top - typed, 0.0, 1.0);

  if (dz) {
    // d l1 / dz = p - e_y (zero while clamped).
    // d l2 / dz_k = p_k (a_k - l2) with a = 1[top n] - 1[type].
    for (std::size_t k = 0; k < v; ++k) dz[k] = static_cast<T>(-out.l2 * p[k]);
    for (std::size_t i = 0; i < n; ++i) dz[order[i]] += p[order[i]];
    for (auto m : members) dz[m] -= p[m];
    if (py >= kLogClamp) {
      for (std::size_t k = 0; k < v; ++k) dz[k] += p[k];
      dz[y] -= T(1);
    }
    for (std::size_t k = 0; k < v; ++k) dz[k] = static_cast<T>(dz[k] * scale);
  }
  return out;
}

struct ChunkResult {
  double sum_l1 = 0.0;
  double sum_l2 = 0.0;
  std::size_t steps = 0;
  std::size_t correct = 0;
};

inline bool has_target(const EncodedSequence& s, std::size_t t) { return t + 1 < s.ids.size(); }

inline std::size_t count_targets(const std::vector<const EncodedSequence*>& batch, std::size_t t0,
                                 std::size_t t1) {
  std::size_t n = 0;
  for (const auto* s : batch) {
    const std::size_t last = s->ids.empty() ? 0 : s->ids.size() - 1;
    if (last > t0) n += std::min(last, t1) - t0;
  }
  return n;
}

// Runs steps [t0, t1) of every sequence in `batch`, carrying H and C (each
// hidden x batch). With `grad`, accumulates `scale` times the gradient of
// the summed per-step loss, truncated at t0.
template <typename T>
ChunkResult run_chunk(const BasicModel<T>& model, const std::vector<const EncodedSequence*>& batch,
                      std::size_t t0, std::size_t t1, Mat<T>& H, Mat<T>& C, const TargetTypes& kinds,
                      Params<T>* grad, double scale) {
  const auto& p = model.params();
  const auto& hp = model.hyperparams();
  const auto B = static_cast<Eigen::Index>(batch.size());
  const auto D = static_cast<Eigen::Index>(hp.embed_dim);
  const auto Hd = static_cast<Eigen::Index>(hp.hidden_dim);
  const auto Dt = static_cast<Eigen::Index>(hp.type_embed_dim);
  const auto V = static_cast<Eigen::Index>(model.vocab_size());
  const std::size_t steps = t1 - t0;

  struct Step {
    Mat<T> xh, i, f, g, o, c_prev, tc, du;
    std::vector<FragmentId> input, parent;
    std::vector<int> type;
  };
  std::vector<Step> cache;
  if (grad) cache.resize(steps);

  ChunkResult out;
  std::vector<std::size_t> order;
  Mat<T> logits(V, B);
  Mat<T> dz = Mat<T>::Zero(V, B);
  Mat<T> u(Hd + Dt + D, B);

  for (std::size_t s = 0; s < steps; ++s) {
    const std::size_t t = t0 + s;
    std::vector<FragmentId> input(batch.size(), fragmenter::kBos);
    std::vector<FragmentId> parent(batch.size(), fragmenter::kBos);
    std::vector<int> type(batch.size(), -1);
    for (std::size_t b = 0; b < batch.size(); ++b) {
      const auto& seq = *batch[b];
      if (t < seq.ids.size()) input[b] = seq.ids[t];
      if (has_target(seq, t)) {
        const auto y = seq.ids[t + 1];
        if (y >= kinds.kind_of.size()) throw VocabRangeError("target outside the vocabulary");
        type[b] = kinds.kind_of[y];
        if (type[b] < 0) throw ReservedTarget("BOS cannot be a training target");
        parent[b] = seq.ids[static_cast<std::size_t>(seq.parents[t + 1])];
      }
      if (input[b] >= model.vocab_size() || parent[b] >= model.vocab_size()) {
        throw VocabRangeError("sequence id outside the model vocabulary");
      }
    }

    Mat<T> xh(D + Hd, B);
    for (Eigen::Index b = 0; b < B; ++b) {
      xh.col(b).head(D) = p.embedding.col(input[static_cast<std::size_t>(b)]);
    }
    xh.bottomRows(Hd) = H;
    Mat<T> z = p.lstm_w * xh;
    z.colwise() += p.lstm_b.col(0);
    Mat<T> gi = sigmoid_m<T>(z.topRows(Hd));
    Mat<T> gf = sigmoid_m<T>(z.middleRows(Hd, Hd));
    Mat<T> gg = z.middleRows(2 * Hd, Hd).array().tanh().matrix();
    Mat<T> go = sigmoid_m<T>(z.bottomRows(Hd));
    Mat<T> c_prev = C;
    C = gf.cwiseProduct(C) + gi.cwiseProduct(gg);
    Mat<T> tc = C.array().tanh().matrix();
    H = go.cwiseProduct(tc);

    u.topRows(Hd) = H;
    for (Eigen::Index b = 0; b < B; ++b) {
      const auto bi = static_cast<std::size_t>(b);
      const auto k = type[bi] < 0 ? 0 : type[bi];
      u.col(b).segment(Hd, Dt) = p.type_embedding.col(k);
      u.col(b).tail(D) = p.embedding.col(parent[bi]);
    }
    logits.noalias() = p.out_w * u;
    logits.colwise() += p.out_b.col(0);

    bool any = false;
    for (Eigen::Index b = 0; b < B; ++b) {
      const auto bi = static_cast<std::size_t>(b);
      if (type[bi] < 0) {
        dz.col(b).setZero();
        continue;
      }
      any = true;
      auto col = logits.col(b);
      const T mx = col.maxCoeff();
      col = (col.array() - mx).exp().matrix();
      col /= col.sum();
      const auto y = batch[bi]->ids[t + 1];
      Eigen::Index arg = 0;
      col.maxCoeff(&arg);
      if (static_cast<FragmentId>(arg) == y) ++out.correct;
      auto lb = column_loss<T>(col.data(), static_cast<std::size_t>(V), y,
                               kinds.members[static_cast<std::size_t>(type[bi])], order,
                               grad ? dz.col(b).data() : nullptr, scale);
      out.sum_l1 += lb.l1;
      out.sum_l2 += lb.l2;
      ++out.steps;
    }

    if (grad) {
      auto& st = cache[s];
      if (any) {
        grad->out_w.noalias() += dz * u.transpose();
        grad->out_b.col(0) += dz.rowwise().sum();
        st.du.noalias() = p.out_w.transpose() * dz;
        for (Eigen::Index b = 0; b < B; ++b) {
          const auto bi = static_cast<std::size_t>(b);
          if (type[bi] < 0) continue;
          grad->type_embedding.col(type[bi]) += st.du.col(b).segment(Hd, Dt);
          grad->embedding.col(parent[bi]) += st.du.col(b).tail(D);
        }
      } else {
        st.du = Mat<T>::Zero(Hd + Dt + D, B);
      }
      st.xh = std::move(xh);
      st.i = std::move(gi);
      st.f = std::move(gf);
      st.g = std::move(gg);
      st.o = std::move(go);
      st.c_prev = std::move(c_prev);
      st.tc = std::move(tc);
      st.input = std::move(input);
    }
  }

  if (!grad) return out;

  Mat<T> dh_next = Mat<T>::Zero(Hd, B);
  Mat<T> dc_next = Mat<T>::Zero(Hd, B);
  Mat<T> dzg(4 * Hd, B);
  for (std::size_t s = steps; s-- > 0;) {
    auto& st = cache[s];
    Mat<T> dh = st.du.topRows(Hd) + dh_next;
    Mat<T> dc = dh.cwiseProduct(st.o).cwiseProduct(
                    (T(1) - st.tc.array().square()).matrix()) +
                dc_next;
    Mat<T> d_o = dh.cwiseProduct(st.tc);
    Mat<T> d_i = dc.cwiseProduct(st.g);
    Mat<T> d_g = dc.cwiseProduct(st.i);
    Mat<T> d_f = dc.cwiseProduct(st.c_prev);
    dzg.topRows(Hd) = d_i.cwiseProduct(st.i.cwiseProduct((T(1) - st.i.array()).matrix()));
    dzg.middleRows(Hd, Hd) = d_f.cwiseProduct(st.f.cwiseProduct((T(1) - st.f.array()).matrix()));
    dzg.middleRows(2 * Hd, Hd) = d_g.cwiseProduct((T(1) - st.g.array().square()).matrix());
    dzg.bottomRows(Hd) = d_o.cwiseProduct(st.o.cwiseProduct((T(1) - st.o.array()).matrix()));
    grad->lstm_w.noalias() += dzg * st.xh.transpose();
    grad->lstm_b.col(0) += dzg.rowwise().sum();
    Mat<T> dxh = p.lstm_w.transpose() * dzg;
    for (Eigen::Index b = 0; b < B; ++b) {
      grad->embedding.col(st.input[static_cast<std::size_t>(b)]) += dxh.col(b).head(D);
    }
    dh_next = dxh.bottomRows(Hd);
    dc_next = dc.cwiseProduct(st.f);
  }
  return out;
}

}  // namespace fraggen::nnlm::kernels
