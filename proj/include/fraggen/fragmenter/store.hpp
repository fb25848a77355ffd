#pragma once

#include <filesystem>
#include <vector>

#include "fraggen/fragmenter/vocabulary.hpp"

namespace fraggen::fragmenter {

// On-disk fragment store: vocab.jsonl (one line per id, reserved ids
// included) and sequences.jsonl (provenance, ids, parents per line).
void write_store(const std::filesystem::path& dir, const Vocabulary& vocab,
                 const std::vector<EncodedSequence>& sequences);

Vocabulary read_vocabulary(const std::filesystem::path& dir);
std::vector<EncodedSequence> read_sequences(const std::filesystem::path& dir);

}  // namespace fraggen::fragmenter
