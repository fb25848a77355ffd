#pragma once

#include <cstdint>
#include <filesystem>

#include <nlohmann/json.hpp>

#include "fraggen/fragmenter/vocabulary.hpp"
#include "fraggen/nnlm/model.hpp"

namespace fraggen::nnlm {

inline constexpr char kCheckpointMagic[] = "FRAGLM1";

struct Checkpoint {
  Model model;
  std::uint64_t vocab_hash = 0;
  nlohmann::json info;  // free-form, e.g. epochs trained and loss history
};

// Layout: magic, u32 LE header length, JSON header, float32 LE payload
// (weights then momentum buffers), u32 LE CRC32 of everything before it.
void save_checkpoint(const Model& model, std::uint64_t vocab_hash,
                     const std::filesystem::path& path, const nlohmann::json& info = {});

// Throws ChecksumError on a corrupt or truncated file.
Checkpoint load_checkpoint(const std::filesystem::path& path);
// Also throws VocabMismatch if the file was trained on another vocabulary.
Checkpoint load_checkpoint(const std::filesystem::path& path, const fragmenter::Vocabulary& vocab);

}  // namespace fraggen::nnlm
