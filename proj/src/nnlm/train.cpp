#include "fraggen/nnlm/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "fraggen/errors.hpp"
#include "nnlm/kernels.hpp"

namespace fraggen::nnlm {

namespace {

std::size_t max_length(const std::vector<const EncodedSequence*>& batch) {
  std::size_t n = 0;
  for (const auto* s : batch) n = std::max(n, s->ids.size());
  return n;
}

template <typename T>
void apply_update(BasicModel<T>& model, Params<T>& grad, double lr) {
  const auto& hp = model.hyperparams();
  auto g = grad.tensors();
  auto theta = model.params().tensors();
  auto vel = model.velocity().tensors();
  double sq = 0.0;
  for (const auto* t : g) sq += t->template cast<double>().squaredNorm();
  const double norm = std::sqrt(sq);
  const T clip = norm > hp.grad_clip ? static_cast<T>(hp.grad_clip / norm) : T(1);
  const auto mu = static_cast<T>(hp.momentum);
  const auto lambda = static_cast<T>(hp.l2_penalty);
  const auto step = static_cast<T>(lr);
  for (std::size_t i = 0; i < kTensorCount; ++i) {
    Mat<T> total = clip * *g[i] + lambda * *theta[i];
    *vel[i] = mu * *vel[i] - step * total;
    *theta[i] += *vel[i];
  }
}

}  // namespace

EpochStats train_epoch(Model& model, const std::vector<EncodedSequence>& data,
                       const TargetTypes& types, std::size_t epoch) {
  const auto& hp = model.hyperparams();
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::seed_seq seq{static_cast<std::uint32_t>(hp.seed), static_cast<std::uint32_t>(hp.seed >> 32),
                    static_cast<std::uint32_t>(epoch)};
  std::mt19937_64 rng(seq);
  std::shuffle(order.begin(), order.end(), rng);

  EpochStats stats;
  stats.learning_rate = hp.learning_rate * std::pow(hp.lr_decay, static_cast<double>(epoch));
  double sum_l1 = 0.0;
  double sum_l2 = 0.0;
  const auto hd = static_cast<Eigen::Index>(hp.hidden_dim);
  std::size_t batch_index = 0;
  for (std::size_t start = 0; start < order.size(); start += hp.batch_size, ++batch_index) {
    std::vector<const EncodedSequence*> batch;
    for (std::size_t i = start; i < std::min(order.size(), start + hp.batch_size); ++i) {
      batch.push_back(&data[order[i]]);
    }
    const std::size_t len = max_length(batch);
    const auto b = static_cast<Eigen::Index>(batch.size());
    Mat<float> h = Mat<float>::Zero(hd, b);
    Mat<float> c = Mat<float>::Zero(hd, b);
    for (std::size_t t0 = 0; t0 + 1 < len; t0 += hp.bptt) {
      const std::size_t t1 = std::min(t0 + hp.bptt, len - 1);
      const std::size_t n = kernels::count_targets(batch, t0, t1);
      if (n == 0) continue;
      auto grad = model.params().zeros_like();
      auto r = kernels::run_chunk<float>(model, batch, t0, t1, h, c, types, &grad,
                                         1.0 / static_cast<double>(n));
      if (!std::isfinite(r.sum_l1) || !std::isfinite(r.sum_l2) || !grad.all_finite()) {
        throw DivergedError(batch_index);
      }
      apply_update(model, grad, stats.learning_rate);
      if (!model.params().all_finite()) throw DivergedError(batch_index);
      sum_l1 += r.sum_l1;
      sum_l2 += r.sum_l2;
      stats.steps += r.steps;
    }
  }
  if (stats.steps > 0) {
    stats.mean_l1 = sum_l1 / static_cast<double>(stats.steps);
    stats.mean_l2 = sum_l2 / static_cast<double>(stats.steps);
  }
  return stats;
}

EpochStats train_epoch(Model& model, const std::vector<EncodedSequence>& data,
                       const fragmenter::Vocabulary& vocab, std::size_t epoch) {
  return train_epoch(model, data, TargetTypes(vocab), epoch);
}

double Metrics::perplexity() const { return std::exp(mean_l1); }

Metrics evaluate(const Model& model, const std::vector<EncodedSequence>& data,
                 const TargetTypes& types) {
  const auto& hp = model.hyperparams();
  const auto hd = static_cast<Eigen::Index>(hp.hidden_dim);
  Metrics m;
  double sum_l1 = 0.0;
  double sum_l2 = 0.0;
  std::size_t correct = 0;
  for (std::size_t start = 0; start < data.size(); start += hp.batch_size) {
    std::vector<const EncodedSequence*> batch;
    for (std::size_t i = start; i < std::min(data.size(), start + hp.batch_size); ++i) {
      batch.push_back(&data[i]);
    }
    const std::size_t len = max_length(batch);
    if (len < 2) continue;
    const auto b = static_cast<Eigen::Index>(batch.size());
    Mat<float> h = Mat<float>::Zero(hd, b);
    Mat<float> c = Mat<float>::Zero(hd, b);
    auto r = kernels::run_chunk<float>(model, batch, 0, len - 1, h, c, types, nullptr, 1.0);
    sum_l1 += r.sum_l1;
    sum_l2 += r.sum_l2;
    correct += r.correct;
    m.steps += r.steps;
  }
  if (m.steps == 0) throw EmptyDataset();
  const auto n = static_cast<double>(m.steps);
  m.mean_l1 = sum_l1 / n;
  m.mean_l2 = sum_l2 / n;
  m.accuracy = static_cast<double>(correct) / n;
  return m;
}

Metrics evaluate(const Model& model, const std::vector<EncodedSequence>& data,
                 const fragmenter::Vocabulary& vocab) {
  return evaluate(model, data, TargetTypes(vocab));
}

double perplexity(const Model& model, const std::vector<EncodedSequence>& data,
                  const fragmenter::Vocabulary& vocab) {
  return evaluate(model, data, vocab).perplexity();
}

double type_error(const Model& model, const std::vector<EncodedSequence>& data,
                  const fragmenter::Vocabulary& vocab) {
  return evaluate(model, data, vocab).type_error();
}

template <typename T>
double objective(const BasicModel<T>& model, const std::vector<EncodedSequence>& sample,
                 const TargetTypes& types, Params<T>* grad) {
  std::vector<const EncodedSequence*> batch;
  for (const auto& s : sample) batch.push_back(&s);
  const std::size_t len = max_length(batch);
  const std::size_t n = len < 2 ? 0 : kernels::count_targets(batch, 0, len - 1);
  if (n == 0) throw EmptyDataset();
  const auto hd = static_cast<Eigen::Index>(model.hyperparams().hidden_dim);
  const auto b = static_cast<Eigen::Index>(batch.size());
  Mat<T> h = Mat<T>::Zero(hd, b);
  Mat<T> c = Mat<T>::Zero(hd, b);
  auto r = kernels::run_chunk<T>(model, batch, 0, len - 1, h, c, types, grad,
                                 1.0 / static_cast<double>(n));
  return (r.sum_l1 + r.sum_l2) / static_cast<double>(n);
}

template double objective<float>(const BasicModel<float>&, const std::vector<EncodedSequence>&,
                                 const TargetTypes&, Params<float>*);
template double objective<double>(const BasicModel<double>&, const std::vector<EncodedSequence>&,
                                  const TargetTypes&, Params<double>*);

GradientReport check_gradients(const BasicModel<double>& model,
                               const std::vector<EncodedSequence>& sample,
                               const TargetTypes& types, double eps) {
  auto analytic = model.params().zeros_like();
  objective(model, sample, types, &analytic);
  BasicModel<double> probe = model;
  GradientReport report;
  auto a = analytic.tensors();
  auto theta = probe.params().tensors();
  for (std::size_t i = 0; i < kTensorCount; ++i) {
    auto& t = *theta[i];
    for (Eigen::Index k = 0; k < t.size(); ++k) {
      const double saved = t(k);
      t(k) = saved + eps;
      const double up = objective<double>(probe, sample, types, nullptr);
      t(k) = saved - eps;
      const double down = objective<double>(probe, sample, types, nullptr);
      t(k) = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double exact = (*a[i])(k);
      const double rel =
          std::abs(exact - numeric) / std::max(std::abs(exact) + std::abs(numeric), 1e-7);
      if (rel > report.max_rel_error || report.worst_tensor.empty()) {
        report.max_rel_error = rel;
        report.worst_tensor = std::string(kTensorNames[i]);
      }
      ++report.checked;
    }
  }
  return report;
}

}  // namespace fraggen::nnlm
