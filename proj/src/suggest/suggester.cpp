#include "fraggen/suggest/suggester.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "fraggen/errors.hpp"

namespace fraggen::suggest {

namespace {

bool reserved(FragmentId id) { return fragmenter::Vocabulary::is_reserved(id); }

// Highest score first, lower id on ties.
void rank(std::vector<Suggestion>& s, std::size_t k) {
  auto better = [](const Suggestion& a, const Suggestion& b) {
    return a.score > b.score || (a.score == b.score && a.id < b.id);
  };
  if (s.size() > k) {
    std::partial_sort(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(k), s.end(), better);
    s.resize(k);
  } else {
    std::sort(s.begin(), s.end(), better);
  }
}

class LstmSession : public Session {
 public:
  LstmSession(const nnlm::Model& model, const std::vector<FragmentId>& context)
      : model_(model), state_(model.initial_state()) {
    for (auto id : context) model_.advance(state_, id);
  }
  void push(FragmentId id) override { model_.advance(state_, id); }
  std::vector<Suggestion> suggest(estree::NodeKind type, FragmentId parent,
                                  std::size_t k) override {
    const auto p = model_.predict(state_, type, parent);
    std::vector<Suggestion> out;
    out.reserve(static_cast<std::size_t>(p.size()));
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      const auto id = static_cast<FragmentId>(i);
      if (!reserved(id)) out.push_back({id, static_cast<double>(p[i])});
    }
    rank(out, k);
    return out;
  }

 private:
  const nnlm::Model& model_;
  nnlm::LstmState<float> state_;
};

class MarkovSession : public Session {
 public:
  MarkovSession(const MarkovSuggester& m, const std::vector<FragmentId>& context) : m_(m) {
    const std::size_t from = context.size() > 2 ? context.size() - 2 : 0;
    last_.assign(context.begin() + static_cast<std::ptrdiff_t>(from), context.end());
  }
  void push(FragmentId id) override {
    last_.push_back(id);
    if (last_.size() > 2) last_.erase(last_.begin());
  }
  std::vector<Suggestion> suggest(estree::NodeKind, FragmentId, std::size_t k) override {
    std::vector<Suggestion> out;
    for (const auto& [id, p] : m_.distribution(last_)) {
      if (!reserved(id)) out.push_back({id, p});
    }
    rank(out, k);
    return out;
  }

 private:
  const MarkovSuggester& m_;
  std::vector<FragmentId> last_;
};

class RandomSession : public Session {
 public:
  RandomSession(std::size_t v, Rng& rng) : v_(v), rng_(rng) {}
  void push(FragmentId) override {}
  std::vector<Suggestion> suggest(estree::NodeKind, FragmentId, std::size_t k) override {
    const std::size_t first = fragmenter::kFirstEntryId;
    const std::size_t n = v_ > first ? v_ - first : 0;
    k = std::min(k, n);
    // Partial Fisher-Yates over [first, v).
    std::vector<FragmentId> ids(n);
    std::iota(ids.begin(), ids.end(), static_cast<FragmentId>(first));
    std::vector<Suggestion> out;
    for (std::size_t i = 0; i < k; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, n - 1);
      std::swap(ids[i], ids[pick(rng_)]);
      out.push_back({ids[i], 1.0 / static_cast<double>(n)});
    }
    return out;
  }

 private:
  std::size_t v_;
  Rng& rng_;
};

}  // namespace

std::vector<Suggestion> Suggester::suggest(const std::vector<FragmentId>& context,
                                           estree::NodeKind required_type, FragmentId parent,
                                           std::size_t k, Rng& rng) const {
  return start(context, rng)->suggest(required_type, parent, k);
}

LstmSuggester::LstmSuggester(std::shared_ptr<const nnlm::Model> model) : model_(std::move(model)) {}

std::unique_ptr<Session> LstmSuggester::start(const std::vector<FragmentId>& context,
                                              Rng&) const {
  return std::make_unique<LstmSession>(*model_, context);
}

void MarkovSuggester::add(const std::vector<FragmentId>& context, FragmentId next,
                          std::uint64_t n) {
  table_[context][next] += n;
}

MarkovSuggester MarkovSuggester::train(const std::vector<EncodedSequence>& sequences,
                                       std::size_t vocab_size) {
  MarkovSuggester m(vocab_size);
  for (const auto& seq : sequences) {
    const auto& ids = seq.ids;
    for (std::size_t t = 1; t < ids.size(); ++t) {
      m.add({}, ids[t], 1);
      m.add({ids[t - 1]}, ids[t], 1);
      if (t >= 2) m.add({ids[t - 2], ids[t - 1]}, ids[t], 1);
    }
  }
  return m;
}

const MarkovSuggester::Counts* MarkovSuggester::usable(const std::vector<FragmentId>& key) const {
  auto it = table_.find(key);
  if (it == table_.end()) return nullptr;
  for (const auto& [id, n] : it->second) {
    if (!reserved(id) && n > 0) return &it->second;
  }
  return nullptr;
}

std::map<FragmentId, double> MarkovSuggester::distribution(
    const std::vector<FragmentId>& context) const {
  const Counts* counts = nullptr;
  for (std::size_t order = std::min<std::size_t>(2, context.size());; --order) {
    std::vector<FragmentId> key(context.end() - static_cast<std::ptrdiff_t>(order), context.end());
    counts = usable(key);
    if (counts || order == 0) break;
  }
  std::map<FragmentId, double> out;
  if (!counts) return out;
  double total = 0;
  for (const auto& [id, n] : *counts) total += static_cast<double>(n);
  for (const auto& [id, n] : *counts) out[id] = static_cast<double>(n) / total;
  return out;
}

std::unique_ptr<Session> MarkovSuggester::start(const std::vector<FragmentId>& context,
                                                Rng&) const {
  return std::make_unique<MarkovSession>(*this, context);
}

void MarkovSuggester::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << nlohmann::json{{"vocab_size", vocab_size_}}.dump() << '\n';
  for (const auto& [ctx, counts] : table_) {
    for (const auto& [id, n] : counts) {
      out << nlohmann::json{{"context", ctx}, {"next", id}, {"count", n}}.dump() << '\n';
    }
  }
}

MarkovSuggester MarkovSuggester::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error("empty Markov model " + path.string());
  try {
    MarkovSuggester m(nlohmann::json::parse(line).at("vocab_size").get<std::size_t>());
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto j = nlohmann::json::parse(line);
      auto ctx = j.at("context").get<std::vector<FragmentId>>();
      if (ctx.size() > 2) throw Error("Markov context longer than 2");
      m.add(ctx, j.at("next").get<FragmentId>(), j.at("count").get<std::uint64_t>());
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed Markov model " + path.string() + ": " + e.what());
  }
}

std::unique_ptr<Session> RandomSuggester::start(const std::vector<FragmentId>&, Rng& rng) const {
  return std::make_unique<RandomSession>(vocab_size_, rng);
}

}  // namespace fraggen::suggest
