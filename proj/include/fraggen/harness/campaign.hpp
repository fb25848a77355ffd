#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fraggen/generator/generator.hpp"
#include "fraggen/harness/engine.hpp"
#include "fraggen/normalizer/builtins.hpp"
#include "fraggen/resolver/resolver.hpp"

namespace fraggen::harness {

struct CrashRecord {
  std::string key;
  std::string signal;
  std::string source;
  nlohmann::json provenance;  // seed index, test index, ...
  std::string first_seen;     // ISO-8601 UTC
  std::uint64_t hits = 1;

  nlohmann::json meta() const;
};

// One directory per dedup key under `root`. Safe to share between workers.
class CrashStore {
 public:
  explicit CrashStore(std::filesystem::path root);

  // Returns true when `key` was new. Either way the hit count is bumped and
  // meta.json rewritten.
  bool insert_if_absent(CrashRecord record, const std::string& stderr_text);

  std::size_t unique() const;
  std::vector<CrashRecord> records() const;
  const std::filesystem::path& root() const { return root_; }

  // Reads crashes/<key>/ back.
  static CrashRecord load(const std::filesystem::path& dir);

 private:
  void write_meta(const CrashRecord& r) const;

  std::filesystem::path root_;
  mutable std::mutex mu_;
  std::map<std::string, CrashRecord> records_;
};

// Fraction of `tests` classified pass. Throws ConfigError on an empty list.
double pass_rate(const EngineConfig& cfg, const std::vector<std::string>& tests,
                 const std::filesystem::path& scratch);

struct GeneratedTest {
  std::string source;
  std::size_t seed_index = 0;
  std::size_t appended = 0;
  std::size_t attempts = 0;
};

// Test i is a pure function of (rng_seed, i), so streams do not depend on
// worker count or scheduling.
class TestFactory {
 public:
  TestFactory(const std::vector<generator::Seed>& seeds, const suggest::Suggester& suggester,
              const fragmenter::Vocabulary& vocab, generator::GenerationParams params,
              bool resolve, normalizer::BuiltinRegistry builtins,
              resolver::UsageHints hints, std::uint64_t rng_seed, std::size_t max_attempts = 16);

  // nullopt when every attempt failed to produce a complete program.
  std::optional<GeneratedTest> make(std::uint64_t index) const;

 private:
  const std::vector<generator::Seed>& seeds_;
  const suggest::Suggester& suggester_;
  const fragmenter::Vocabulary& vocab_;
  generator::GenerationParams params_;
  bool resolve_;
  normalizer::BuiltinRegistry builtins_;
  resolver::UsageHints hints_;
  std::uint64_t rng_seed_;
  std::size_t max_attempts_;
};

suggest::Rng index_rng(std::uint64_t seed, std::uint64_t index);

struct Budget {
  std::optional<std::uint64_t> tests;
  std::optional<double> seconds;
};

struct CampaignStats {
  std::uint64_t generated = 0;
  std::uint64_t generation_failures = 0;
  std::uint64_t executed = 0;
  std::uint64_t pass = 0;
  std::uint64_t runtime_error = 0;
  std::uint64_t crash = 0;
  std::uint64_t timeout = 0;
  std::uint64_t other = 0;
  std::uint64_t unique_crashes = 0;
  std::map<std::string, std::uint64_t> errors_by_name;
  double elapsed_seconds = 0.0;
  bool aborted = false;
  std::string abort_reason;

  double pass_rate() const { return executed ? static_cast<double>(pass) / executed : 0.0; }
  double throughput() const { return elapsed_seconds > 0 ? executed / elapsed_seconds : 0.0; }
  void merge(const CampaignStats& o);
  nlohmann::json to_json() const;
  static CampaignStats from_json(const nlohmann::json& j);
};

struct CampaignOptions {
  EngineConfig engine;
  Budget budget;
  std::size_t workers = 1;
  std::filesystem::path out_dir;  // stats.json, events.jsonl, crashes/, tests/ (if kept)
  bool keep_tests = false;
  // Polled between tests; returning true stops the campaign gracefully.
  std::function<bool()> should_stop;
};

// Throws EngineUnavailable (after persisting partial stats) when the engine
// cannot be started.
CampaignStats run_campaign(const TestFactory& factory, const CampaignOptions& options);

}  // namespace fraggen::harness
