#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fraggen/adapter/client.hpp"
#include "fraggen/generator/generator.hpp"
#include "fraggen/harness/campaign.hpp"
#include "fraggen/nnlm/train.hpp"
#include "fraggen/normalizer/builtins.hpp"

namespace fraggen::pipeline {

namespace fs = std::filesystem;

inline constexpr std::uintmax_t kMaxSourceBytes = 30 * 1024;

struct IngestOptions {
  std::uintmax_t max_bytes = kMaxSourceBytes;
  std::uint32_t min_freq = 5;
  std::size_t max_fragments = 2048;
  std::string engine = "ecmascript";  // builtins registry name
  std::size_t limit = 0;              // 0 means every file
};

struct IngestReport {
  std::size_t files = 0;
  std::size_t kept = 0;
  std::size_t too_large = 0;
  std::size_t unparseable = 0;
  std::size_t unsupported = 0;
  std::size_t too_long = 0;
  std::size_t vocab_size = 0;
  nlohmann::json to_json() const;
};

// Normalized, eval-inlined seeds plus the fragment store:
//   <out>/vocab.jsonl, sequences.jsonl, seeds/<name>.json, ingest.json
// `adapter` may be null; then .js inputs are skipped as unparseable and
// evals are left alone.
IngestReport ingest(const std::vector<fs::path>& inputs, const fs::path& out,
                    const IngestOptions& options, adapter::Client* adapter);

// *.json and *.js files under `dir`, sorted.
std::vector<fs::path> list_inputs(const fs::path& dir);

std::vector<estree::AstNode> load_seed_asts(const fs::path& store);
std::vector<generator::Seed> load_seeds(const fs::path& store, const fragmenter::Vocabulary& vocab);

// Trains on the store, calling `on_epoch(epoch, train stats, metrics)` after
// each epoch, and returns the model.
nnlm::Model train_store(const fs::path& store, const nnlm::Hyperparams& hp,
                        const std::function<void(std::size_t, const nnlm::EpochStats&,
                                                 const nnlm::Metrics&)>& on_epoch);

struct SuggesterSpec {
  std::string kind = "lstm";  // lstm | markov | random
  fs::path checkpoint;        // lstm
  fs::path markov;            // markov table; trained from the store when empty
};

std::unique_ptr<suggest::Suggester> make_suggester(const SuggesterSpec& spec, const fs::path& store,
                                                   const fragmenter::Vocabulary& vocab);

struct CampaignConfig {
  harness::EngineConfig engine;
  fs::path store;
  SuggesterSpec suggester;
  generator::GenerationParams gen;
  bool resolve = true;
  std::string builtins = "ecmascript";
  std::size_t workers = 1;
  harness::Budget budget;
  std::uint64_t rng_seed = 1;
  fs::path out;
  bool keep_tests = false;

  // Relative paths resolve against `base` (the config file's directory).
  static CampaignConfig from_json(const nlohmann::json& j, const fs::path& base);
};

}  // namespace fraggen::pipeline
