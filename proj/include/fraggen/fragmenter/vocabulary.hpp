#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fraggen/fragmenter/fragment.hpp"

namespace fraggen::fragmenter {

using FragmentId = std::uint32_t;

// Reserved ids: BOS, then one typed OoV per node kind.
inline constexpr FragmentId kBos = 0;
constexpr FragmentId oov_id(estree::NodeKind kind) {
  return 1 + static_cast<FragmentId>(estree::index_of(kind));
}
inline constexpr FragmentId kFirstEntryId = 1 + static_cast<FragmentId>(estree::kNodeKindCount);

// An encoded training sequence. ids[0] is BOS; parents[i] is the position in
// `ids` of the fragment enclosing ids[i] (BOS for the root, -1 for BOS).
struct EncodedSequence {
  std::string provenance;
  std::vector<FragmentId> ids;
  std::vector<std::int32_t> parents;
};

class Vocabulary {
 public:
  struct Entry {
    std::string key;
    Fragment fragment;
    std::uint64_t frequency;
  };

  Vocabulary() = default;
  // Entries must already be in id order (frequency desc, key asc).
  Vocabulary(std::vector<Entry> entries, std::uint32_t min_freq);

  std::size_t size() const { return kFirstEntryId + entries_.size(); }
  std::uint32_t min_freq() const { return min_freq_; }

  static bool is_reserved(FragmentId id) { return id < kFirstEntryId; }
  static bool is_oov(FragmentId id) { return id != kBos && id < kFirstEntryId; }

  // Root kind of an entry or OoV id. Throws VocabRangeError for BOS or ids
  // outside the vocabulary.
  estree::NodeKind kind_of(FragmentId id) const;
  // Throws VocabRangeError for reserved or out-of-range ids.
  const Entry& entry(FragmentId id) const;
  const Fragment& fragment(FragmentId id) const { return entry(id).fragment; }

  std::optional<FragmentId> find(std::string_view key) const;
  // The entry id, or the typed OoV id when the fragment is not in the vocabulary.
  FragmentId encode(const Fragment& fragment) const;

  // Non-reserved ids whose root kind is `kind`.
  const std::vector<FragmentId>& type_index(estree::NodeKind kind) const;
  // Every id of that type, including its OoV id.
  std::vector<FragmentId> type_members(estree::NodeKind kind) const;

  // FNV-1a 64 over the entry keys in id order; checkpoints pin it.
  std::uint64_t hash() const;

  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, FragmentId> index_;
  std::vector<std::vector<FragmentId>> by_kind_ = std::vector<std::vector<FragmentId>>(
      estree::kNodeKindCount);
  std::uint32_t min_freq_ = 5;
};

struct VocabularyOptions {
  std::uint32_t min_freq = 5;              // fragments seen fewer times become OoV
  std::size_t max_fragments = 2048;        // longer files are dropped
};

struct VocabularyBuild {
  Vocabulary vocab;
  std::vector<EncodedSequence> sequences;
  std::size_t dropped = 0;                 // files over max_fragments
  std::size_t oov_replacements = 0;
};

// Throws EmptyCorpus when no sequence survives.
VocabularyBuild build_vocabulary(const std::vector<FragmentSequence>& sequences,
                                 VocabularyOptions options = {});

EncodedSequence encode_sequence(const FragmentSequence& sequence, const Vocabulary& vocab);

// Maps ids (BOS first) back to fragments. Throws VocabRangeError on an OoV id.
std::vector<Fragment> decode_sequence(const std::vector<FragmentId>& ids,
                                      const Vocabulary& vocab);

}  // namespace fraggen::fragmenter
