#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "fraggen/fragmenter/vocabulary.hpp"
#include "fraggen/nnlm/model.hpp"

namespace fraggen::suggest {

using fragmenter::EncodedSequence;
using fragmenter::FragmentId;
using Rng = std::mt19937_64;

struct Suggestion {
  FragmentId id;
  double score;
  friend bool operator==(const Suggestion&, const Suggestion&) = default;
};

// Incremental view of one context. Suggestions never contain BOS or OoV ids
// and come in descending score order.
class Session {
 public:
  virtual ~Session() = default;
  virtual void push(FragmentId id) = 0;
  virtual std::vector<Suggestion> suggest(estree::NodeKind required_type, FragmentId parent,
                                          std::size_t k) = 0;
};

class Suggester {
 public:
  virtual ~Suggester() = default;
  virtual std::string name() const = 0;
  virtual std::size_t vocab_size() const = 0;
  // `rng` must outlive the session; only the random strategy draws from it.
  virtual std::unique_ptr<Session> start(const std::vector<FragmentId>& context,
                                         Rng& rng) const = 0;

  std::vector<Suggestion> suggest(const std::vector<FragmentId>& context,
                                  estree::NodeKind required_type, FragmentId parent, std::size_t k,
                                  Rng& rng) const;
};

class LstmSuggester : public Suggester {
 public:
  explicit LstmSuggester(std::shared_ptr<const nnlm::Model> model);
  std::string name() const override { return "lstm"; }
  std::size_t vocab_size() const override { return model_->vocab_size(); }
  std::unique_ptr<Session> start(const std::vector<FragmentId>& context, Rng& rng) const override;

 private:
  std::shared_ptr<const nnlm::Model> model_;
};

// Order-2 counts with backoff to order 1 and then to unigrams.
class MarkovSuggester : public Suggester {
 public:
  using Counts = std::map<FragmentId, std::uint64_t>;

  MarkovSuggester(std::size_t vocab_size) : vocab_size_(vocab_size) {}
  static MarkovSuggester train(const std::vector<EncodedSequence>& sequences,
                               std::size_t vocab_size);

  std::string name() const override { return "markov"; }
  std::size_t vocab_size() const override { return vocab_size_; }
  std::unique_ptr<Session> start(const std::vector<FragmentId>& context, Rng& rng) const override;

  // Continuation probabilities for the longest observed suffix of `context`
  // with at least one non-reserved continuation. Reserved ids included.
  std::map<FragmentId, double> distribution(const std::vector<FragmentId>& context) const;

  // JSONL: {"context":[a,b],"next":c,"count":n}; the context has 0-2 ids.
  void save(const std::filesystem::path& path) const;
  static MarkovSuggester load(const std::filesystem::path& path);

 private:
  void add(const std::vector<FragmentId>& context, FragmentId next, std::uint64_t n);
  const Counts* usable(const std::vector<FragmentId>& key) const;

  std::size_t vocab_size_;
  std::map<std::vector<FragmentId>, Counts> table_;
};

// k distinct non-reserved ids uniformly at random, clamped to the vocabulary.
class RandomSuggester : public Suggester {
 public:
  explicit RandomSuggester(std::size_t vocab_size) : vocab_size_(vocab_size) {}
  std::string name() const override { return "random"; }
  std::size_t vocab_size() const override { return vocab_size_; }
  std::unique_ptr<Session> start(const std::vector<FragmentId>& context, Rng& rng) const override;

 private:
  std::size_t vocab_size_;
};

}  // namespace fraggen::suggest
