#include "fraggen/fragmenter/vocabulary.hpp"

#include <algorithm>
#include <map>

#include "fraggen/errors.hpp"

namespace fraggen::fragmenter {

using estree::NodeKind;

Vocabulary::Vocabulary(std::vector<Entry> entries, std::uint32_t min_freq)
    : entries_(std::move(entries)), min_freq_(min_freq) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto id = kFirstEntryId + static_cast<FragmentId>(i);
    index_.emplace(entries_[i].key, id);
    by_kind_[estree::index_of(entries_[i].fragment.kind())].push_back(id);
  }
}

NodeKind Vocabulary::kind_of(FragmentId id) const {
  if (id == kBos) throw VocabRangeError("BOS has no fragment type");
  if (id < kFirstEntryId) return static_cast<NodeKind>(id - 1);
  return entry(id).fragment.kind();
}

const Vocabulary::Entry& Vocabulary::entry(FragmentId id) const {
  if (is_reserved(id) || id >= size()) {
    throw VocabRangeError("fragment id " + std::to_string(id) + " has no entry");
  }
  return entries_[id - kFirstEntryId];
}

std::optional<FragmentId> Vocabulary::find(std::string_view key) const {
  auto it = index_.find(std::string(key));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

FragmentId Vocabulary::encode(const Fragment& fragment) const {
  if (auto id = find(canonical_key(fragment))) return *id;
  return oov_id(fragment.kind());
}

const std::vector<FragmentId>& Vocabulary::type_index(NodeKind kind) const {
  return by_kind_[estree::index_of(kind)];
}

std::vector<FragmentId> Vocabulary::type_members(NodeKind kind) const {
  auto out = type_index(kind);
  out.push_back(oov_id(kind));
  return out;
}

std::uint64_t Vocabulary::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 0x100000001b3ULL;
  };
  for (int i = 0; i < 4; ++i) mix(static_cast<unsigned char>(kFirstEntryId >> (8 * i)));
  for (const auto& e : entries_) {
    const auto n = static_cast<std::uint32_t>(e.key.size());
    for (int i = 0; i < 4; ++i) mix(static_cast<unsigned char>(n >> (8 * i)));
    for (unsigned char c : e.key) mix(c);
  }
  return h;
}

EncodedSequence encode_sequence(const FragmentSequence& sequence, const Vocabulary& vocab) {
  EncodedSequence out;
  out.provenance = sequence.provenance;
  out.ids.reserve(sequence.fragments.size() + 1);
  out.parents.reserve(sequence.fragments.size() + 1);
  out.ids.push_back(kBos);
  out.parents.push_back(-1);
  for (std::size_t i = 0; i < sequence.fragments.size(); ++i) {
    out.ids.push_back(vocab.encode(sequence.fragments[i]));
    out.parents.push_back(sequence.parents[i] + 1);
  }
  return out;
}

VocabularyBuild build_vocabulary(const std::vector<FragmentSequence>& sequences,
                                 VocabularyOptions options) {
  VocabularyBuild out;
  std::vector<const FragmentSequence*> kept;
  for (const auto& s : sequences) {
    if (s.fragments.empty() || s.fragments.size() > options.max_fragments) {
      ++out.dropped;
      continue;
    }
    kept.push_back(&s);
  }
  if (kept.empty()) throw EmptyCorpus();

  struct Count {
    const Fragment* fragment;
    std::uint64_t n = 0;
  };
  std::map<std::string, Count> counts;
  for (const auto* s : kept) {
    for (const auto& f : s->fragments) {
      auto& c = counts[canonical_key(f)];
      c.fragment = &f;
      ++c.n;
    }
  }

  std::vector<Vocabulary::Entry> entries;
  for (auto& [key, c] : counts) {
    if (c.n >= options.min_freq) entries.push_back({key, *c.fragment, c.n});
  }
  std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return a.frequency > b.frequency;
  });
  out.vocab = Vocabulary(std::move(entries), options.min_freq);

  for (const auto* s : kept) {
    auto encoded = encode_sequence(*s, out.vocab);
    for (auto id : encoded.ids) {
      if (Vocabulary::is_oov(id)) ++out.oov_replacements;
    }
    out.sequences.push_back(std::move(encoded));
  }
  return out;
}

std::vector<Fragment> decode_sequence(const std::vector<FragmentId>& ids,
                                      const Vocabulary& vocab) {
  std::vector<Fragment> out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i == 0 && ids[i] == kBos) continue;
    out.push_back(vocab.fragment(ids[i]));
  }
  return out;
}

}  // namespace fraggen::fragmenter
